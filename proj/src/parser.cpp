#include "ssl/parser.hpp"

#include <fmt/core.h>

#include <limits>
#include <set>
#include <utility>

#include "ssl/lexer.hpp"

namespace ssl {

namespace {

struct ParseAbort {};

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    ParseResult run() {
        Program prog;
        while (!at(Tok::Eof)) {
            try {
                switch (cur().kind) {
                    case Tok::KwType: parse_type_decl(prog); break;
                    case Tok::KwProc: parse_proc_decl(prog); break;
                    case Tok::KwOrder: parse_order_decl(prog); break;
                    case Tok::KwMain: parse_main_decl(prog); break;
                    default:
                        fail(cur().span, fmt::format("expected a declaration, found {}",
                                                     tok_name(cur().kind)));
                }
            } catch (const ParseAbort&) {
                sync_to_decl();
            }
        }
        ParseResult res;
        res.errors = std::move(errs_);
        if (res.errors.empty())
            res.program = std::move(prog);
        return res;
    }

private:
    std::vector<Token> toks_;
    size_t pos_ = 0;
    Diags errs_;
    std::set<std::string> binders_; // every cut binder of the current definition
    std::set<std::string> scoped_;  // binders live on the current path

    const Token& cur() const { return toks_[pos_]; }

    bool at(Tok t) const { return cur().kind == t; }

    Token advance() {
        Token t = toks_[pos_];
        if (!at(Tok::Eof))
            ++pos_;
        return t;
    }

    [[noreturn]] void fail(Span sp, std::string msg) {
        errs_.push_back({sp, std::move(msg)});
        throw ParseAbort{};
    }

    Token expect(Tok t, const char* what) {
        if (!at(t))
            fail(cur().span, fmt::format("expected {}, found {}", what, tok_name(cur().kind)));
        return advance();
    }

    void sync_to_decl() {
        while (!at(Tok::Eof) && !at(Tok::KwType) && !at(Tok::KwProc) && !at(Tok::KwOrder) &&
               !at(Tok::KwMain))
            advance();
    }

    int expect_number(const char* what) {
        Token t = expect(Tok::Number, what);
        if (t.number > std::numeric_limits<int>::max())
            fail(t.span, "number out of range");
        return static_cast<int>(t.number);
    }

    // Declarations ----------------------------------------------------------

    void parse_type_decl(Program& prog) {
        expect(Tok::KwType, "'type'");
        Token name = expect(Tok::Ident, "a type name");
        expect(Tok::Equal, "'='");
        expect(Tok::LBracket, "'['");
        int priority = expect_number("a priority");
        expect(Tok::RBracket, "']'");
        Polarity pol;
        if (at(Tok::KwMu))
            pol = Polarity::Mu;
        else if (at(Tok::KwNu))
            pol = Polarity::Nu;
        else
            fail(cur().span,
                 fmt::format("expected 'mu' or 'nu', found {}", tok_name(cur().kind)));
        advance();
        TypePtr body = parse_type();
        prog.sig.entries.push_back({name.text, priority, pol, std::move(body), name.span});
    }

    void parse_proc_decl(Program& prog) {
        expect(Tok::KwProc, "'proc'");
        Token name = expect(Tok::Ident, "a process name");
        expect(Tok::Colon, "':'");
        std::optional<TypePtr> left;
        if (at(Tok::Dot))
            advance();
        else
            left = parse_type();
        expect(Tok::Turnstile, "'|-'");
        TypePtr right = parse_type();
        expect(Tok::Equal, "'='");
        binders_.clear();
        scoped_.clear();
        ProcPtr body = parse_process(std::nullopt);

        ProcDef def;
        def.name = name.text;
        def.left = std::move(left);
        def.right = std::move(right);
        def.body = std::move(body);
        def.left_port = fresh_port("l");
        def.right_port = fresh_port("r");
        def.span = name.span;
        prog.defs.push_back(std::move(def));
    }

    void parse_order_decl(Program& prog) {
        Token kw = expect(Tok::KwOrder, "'order'");
        expect(Tok::LBracket, "'['");
        int family = expect_number("a priority");
        expect(Tok::RBracket, "']'");
        OrderDecl decl;
        decl.family = family;
        decl.span = kw.span;
        decl.chains.push_back(parse_chain());
        while (at(Tok::Comma)) {
            advance();
            decl.chains.push_back(parse_chain());
        }
        prog.orders.push_back(std::move(decl));
    }

    OrderChain parse_chain() {
        Token first = expect(Tok::Ident, "a process name");
        OrderChain chain;
        chain.span = first.span;
        chain.names.push_back(first.text);
        while (at(Tok::Less) || at(Tok::Tilde)) {
            chain.rels.push_back(at(Tok::Less) ? OrderRel::Less : OrderRel::Equiv);
            advance();
            chain.names.push_back(expect(Tok::Ident, "a process name").text);
        }
        return chain;
    }

    void parse_main_decl(Program& prog) {
        Token kw = expect(Tok::KwMain, "'main'");
        Token name = expect(Tok::Ident, "a process name");
        if (prog.main_name)
            fail(kw.span, "duplicate 'main' declaration");
        prog.main_name = name.text;
        prog.main_span = name.span;
    }

    // Types ------------------------------------------------------------------

    TypePtr parse_type() {
        Span sp = cur().span;
        switch (cur().kind) {
            case Tok::Plus: {
                advance();
                return mk_internal(parse_type_branches(), sp);
            }
            case Tok::Amp: {
                advance();
                return mk_external(parse_type_branches(), sp);
            }
            case Tok::Number: {
                Token t = advance();
                if (t.number != 1)
                    fail(t.span, fmt::format("expected a type, found number {}", t.number));
                return mk_one(sp);
            }
            case Tok::Ident: {
                Token t = advance();
                return mk_var(t.text, sp);
            }
            default:
                fail(sp, fmt::format("expected a type, found {}", tok_name(cur().kind)));
        }
    }

    std::vector<TypeBranch> parse_type_branches() {
        expect(Tok::LBrace, "'{'");
        std::vector<TypeBranch> branches;
        if (!at(Tok::RBrace)) {
            for (;;) {
                Token label = expect(Tok::Ident, "a label");
                expect(Tok::Colon, "':'");
                branches.push_back({label.text, parse_type()});
                if (!at(Tok::Comma))
                    break;
                advance();
            }
        }
        expect(Tok::RBrace, "'}'");
        return branches;
    }

    // Processes --------------------------------------------------------------

    // left_binder is the name of the left channel where one is nameable: the
    // tail of a cut binds its fresh channel, the definition's own left channel
    // has no surface name, and waitL removes the left channel entirely.
    ProcPtr parse_process(const std::optional<std::string>& left_binder) {
        Span sp = cur().span;
        switch (cur().kind) {
            case Tok::KwR: {
                advance();
                expect(Tok::Dot, "'.'");
                if (at(Tok::NuUnfold))
                    fail(cur().span,
                         fmt::format("cannot send 'nu_{}' to the right", cur().text));
                if (at(Tok::MuUnfold)) {
                    Token t = advance();
                    expect(Tok::Semi, "';'");
                    auto p = std::make_shared<Proc>();
                    p->kind = ProcKind::SendMuRight;
                    p->span = sp;
                    p->type_var = t.text;
                    p->cont = parse_process(left_binder);
                    return p;
                }
                Token label = expect(Tok::Ident, "a label");
                expect(Tok::Semi, "';'");
                auto p = std::make_shared<Proc>();
                p->kind = ProcKind::SendLabelRight;
                p->span = sp;
                p->label = label.text;
                p->cont = parse_process(left_binder);
                return p;
            }
            case Tok::KwL: {
                advance();
                expect(Tok::Dot, "'.'");
                if (at(Tok::MuUnfold))
                    fail(cur().span,
                         fmt::format("cannot send 'mu_{}' to the left", cur().text));
                if (at(Tok::NuUnfold)) {
                    Token t = advance();
                    expect(Tok::Semi, "';'");
                    auto p = std::make_shared<Proc>();
                    p->kind = ProcKind::SendNuLeft;
                    p->span = sp;
                    p->type_var = t.text;
                    p->cont = parse_process(left_binder);
                    return p;
                }
                Token label = expect(Tok::Ident, "a label");
                expect(Tok::Semi, "';'");
                auto p = std::make_shared<Proc>();
                p->kind = ProcKind::SendLabelLeft;
                p->span = sp;
                p->label = label.text;
                p->cont = parse_process(left_binder);
                return p;
            }
            case Tok::KwCaseL: {
                advance();
                expect(Tok::LParen, "'('");
                if (at(Tok::NuUnfold))
                    fail(cur().span,
                         fmt::format("cannot receive 'nu_{}' with caseL", cur().text));
                if (at(Tok::MuUnfold)) {
                    Token t = advance();
                    expect(Tok::FatArrow, "'=>'");
                    auto p = std::make_shared<Proc>();
                    p->kind = ProcKind::CaseMuLeft;
                    p->span = sp;
                    p->type_var = t.text;
                    p->cont = parse_process(left_binder);
                    expect(Tok::RParen, "')'");
                    return p;
                }
                auto p = std::make_shared<Proc>();
                p->kind = ProcKind::CaseLeft;
                p->span = sp;
                p->branches = parse_proc_branches(left_binder);
                expect(Tok::RParen, "')'");
                return p;
            }
            case Tok::KwCaseR: {
                advance();
                expect(Tok::LParen, "'('");
                if (at(Tok::MuUnfold))
                    fail(cur().span,
                         fmt::format("cannot receive 'mu_{}' with caseR", cur().text));
                if (at(Tok::NuUnfold)) {
                    Token t = advance();
                    expect(Tok::FatArrow, "'=>'");
                    auto p = std::make_shared<Proc>();
                    p->kind = ProcKind::CaseNuRight;
                    p->span = sp;
                    p->type_var = t.text;
                    p->cont = parse_process(left_binder);
                    expect(Tok::RParen, "')'");
                    return p;
                }
                auto p = std::make_shared<Proc>();
                p->kind = ProcKind::CaseRight;
                p->span = sp;
                p->branches = parse_proc_branches(left_binder);
                expect(Tok::RParen, "')'");
                return p;
            }
            case Tok::KwCloseR: {
                advance();
                auto p = std::make_shared<Proc>();
                p->kind = ProcKind::CloseRight;
                p->span = sp;
                return p;
            }
            case Tok::KwWaitL: {
                advance();
                expect(Tok::Semi, "';'");
                auto p = std::make_shared<Proc>();
                p->kind = ProcKind::WaitLeft;
                p->span = sp;
                p->cont = parse_process(std::nullopt);
                return p;
            }
            case Tok::KwFwd: {
                advance();
                auto p = std::make_shared<Proc>();
                p->kind = ProcKind::Forward;
                p->span = sp;
                return p;
            }
            case Tok::KwCall:
                return parse_call(left_binder);
            case Tok::Ident:
                return parse_cut(left_binder);
            default:
                fail(sp, fmt::format("expected a process, found {}", tok_name(cur().kind)));
        }
    }

    ProcPtr parse_call(const std::optional<std::string>& left_binder) {
        Token kw = expect(Tok::KwCall, "'call'");
        Token callee = expect(Tok::Ident, "a process name after 'call'");
        auto p = std::make_shared<Proc>();
        p->kind = ProcKind::Call;
        p->span = kw.span;
        p->callee = callee.text;
        if (at(Tok::Ident)) {
            Token arg = advance();
            if (!left_binder || *left_binder != arg.text)
                fail(arg.span,
                     fmt::format("call argument '{}' does not name the current left channel",
                                 arg.text));
            p->call_arg = arg.text;
        }
        return p;
    }

    ProcPtr parse_cut(const std::optional<std::string>& left_binder) {
        Token name = expect(Tok::Ident, "a channel name");
        if (scoped_.count(name.text) || (left_binder && *left_binder == name.text))
            fail(name.span, fmt::format("duplicate channel binder '{}'", name.text));
        scoped_.insert(name.text);
        binders_.insert(name.text);
        expect(Tok::Colon, "':'");
        TypePtr ty = parse_type();
        expect(Tok::Arrow, "'<-'");
        ProcPtr head;
        if (at(Tok::KwCall)) {
            head = parse_call(left_binder);
        } else if (at(Tok::LParen)) {
            advance();
            head = parse_process(left_binder);
            expect(Tok::RParen, "')'");
        } else {
            fail(cur().span, "cut head must be 'call' or a parenthesized process");
        }
        expect(Tok::Semi, "';'");
        auto p = std::make_shared<Proc>();
        p->kind = ProcKind::Cut;
        p->span = name.span;
        p->cut_channel = name.text;
        p->cut_type = std::move(ty);
        p->cut_head = std::move(head);
        p->cut_tail = parse_process(name.text);
        scoped_.erase(name.text);
        return p;
    }

    std::vector<ProcBranch> parse_proc_branches(const std::optional<std::string>& left_binder) {
        std::vector<ProcBranch> branches;
        std::set<std::string> seen;
        for (;;) {
            Token label = expect(Tok::Ident, "a label");
            if (!seen.insert(label.text).second)
                fail(label.span, fmt::format("duplicate label '{}' in case", label.text));
            expect(Tok::FatArrow, "'=>'");
            branches.push_back({label.text, parse_process(left_binder), label.span});
            if (!at(Tok::Bar))
                break;
            advance();
        }
        return branches;
    }

    std::string fresh_port(const char* stem) const {
        std::string cand = stem;
        for (int i = 1; binders_.count(cand); ++i)
            cand = fmt::format("{}{}", stem, i);
        return cand;
    }
};

} // namespace

ParseResult parse_program(const std::string& source) {
    LexResultT lexed = lex(source);
    if (!lexed.errors.empty())
        return {std::nullopt, std::move(lexed.errors)};
    return Parser(std::move(lexed.tokens)).run();
}

} // namespace ssl
