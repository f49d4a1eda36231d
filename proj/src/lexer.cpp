#include "ssl/lexer.hpp"

#include <cctype>
#include <map>

#include <fmt/format.h>

namespace ssl {

const char* tok_name(Tok t) {
    switch (t) {
        case Tok::Ident: return "identifier";
        case Tok::Number: return "number";
        case Tok::KwType: return "'type'";
        case Tok::KwProc: return "'proc'";
        case Tok::KwOrder: return "'order'";
        case Tok::KwMain: return "'main'";
        case Tok::KwMu: return "'mu'";
        case Tok::KwNu: return "'nu'";
        case Tok::KwCaseL: return "'caseL'";
        case Tok::KwCaseR: return "'caseR'";
        case Tok::KwCloseR: return "'closeR'";
        case Tok::KwWaitL: return "'waitL'";
        case Tok::KwFwd: return "'fwd'";
        case Tok::KwCall: return "'call'";
        case Tok::KwR: return "'R'";
        case Tok::KwL: return "'L'";
        case Tok::MuUnfold: return "'mu_...'";
        case Tok::NuUnfold: return "'nu_...'";
        case Tok::Plus: return "'+'";
        case Tok::Amp: return "'&'";
        case Tok::LBrace: return "'{'";
        case Tok::RBrace: return "'}'";
        case Tok::LParen: return "'('";
        case Tok::RParen: return "')'";
        case Tok::LBracket: return "'['";
        case Tok::RBracket: return "']'";
        case Tok::Colon: return "':'";
        case Tok::Comma: return "','";
        case Tok::Semi: return "';'";
        case Tok::Dot: return "'.'";
        case Tok::Bar: return "'|'";
        case Tok::Turnstile: return "'|-'";
        case Tok::Arrow: return "'<-'";
        case Tok::FatArrow: return "'=>'";
        case Tok::Less: return "'<'";
        case Tok::Tilde: return "'~'";
        case Tok::Equal: return "'='";
        case Tok::Eof: return "end of input";
    }
    return "?";
}

static bool ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

static bool ident_char(char c) {
    return ident_start(c) || std::isdigit(static_cast<unsigned char>(c));
}

LexResultT lex(const std::string& src) {
    static const std::map<std::string, Tok> keywords = {
        {"type", Tok::KwType},   {"proc", Tok::KwProc},   {"order", Tok::KwOrder},
        {"main", Tok::KwMain},   {"mu", Tok::KwMu},       {"nu", Tok::KwNu},
        {"caseL", Tok::KwCaseL}, {"caseR", Tok::KwCaseR}, {"closeR", Tok::KwCloseR},
        {"waitL", Tok::KwWaitL}, {"fwd", Tok::KwFwd},     {"call", Tok::KwCall},
        {"R", Tok::KwR},         {"L", Tok::KwL},
    };

    LexResultT res;
    size_t i = 0;
    int line = 1, col = 1;

    auto advance = [&](size_t n) {
        for (size_t k = 0; k < n; ++k) {
            if (src[i + k] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        i += n;
    };
    auto push = [&](Tok kind, Span sp, std::string text = {}, long num = 0) {
        res.tokens.push_back({kind, std::move(text), num, sp});
    };

    while (i < src.size()) {
        char c = src[i];
        Span sp{line, col};
        if (c == '%') { // comment to end of line
            while (i < src.size() && src[i] != '\n')
                advance(1);
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t j = i;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j])))
                ++j;
            std::string digits = src.substr(i, j - i);
            if (digits.size() > 9) {
                res.errors.push_back({sp, "number out of range"});
                advance(j - i);
                continue;
            }
            push(Tok::Number, sp, digits, std::stol(digits));
            advance(j - i);
            continue;
        }
        if (ident_start(c)) {
            size_t j = i;
            while (j < src.size() && ident_char(src[j]))
                ++j;
            std::string word = src.substr(i, j - i);
            advance(j - i);
            if (word.rfind("mu_", 0) == 0 || word.rfind("nu_", 0) == 0) {
                std::string rest = word.substr(3);
                if (rest.empty()) {
                    res.errors.push_back({sp, fmt::format("expected type name after '{}'", word)});
                    continue;
                }
                push(word[0] == 'm' ? Tok::MuUnfold : Tok::NuUnfold, sp, rest);
                continue;
            }
            auto kw = keywords.find(word);
            if (kw != keywords.end())
                push(kw->second, sp);
            else
                push(Tok::Ident, sp, word);
            continue;
        }
        switch (c) {
            case '+': push(Tok::Plus, sp); advance(1); continue;
            case '&': push(Tok::Amp, sp); advance(1); continue;
            case '{': push(Tok::LBrace, sp); advance(1); continue;
            case '}': push(Tok::RBrace, sp); advance(1); continue;
            case '(': push(Tok::LParen, sp); advance(1); continue;
            case ')': push(Tok::RParen, sp); advance(1); continue;
            case '[': push(Tok::LBracket, sp); advance(1); continue;
            case ']': push(Tok::RBracket, sp); advance(1); continue;
            case ':': push(Tok::Colon, sp); advance(1); continue;
            case ',': push(Tok::Comma, sp); advance(1); continue;
            case ';': push(Tok::Semi, sp); advance(1); continue;
            case '.': push(Tok::Dot, sp); advance(1); continue;
            case '~': push(Tok::Tilde, sp); advance(1); continue;
            case '|':
                if (i + 1 < src.size() && src[i + 1] == '-') {
                    push(Tok::Turnstile, sp);
                    advance(2);
                } else {
                    push(Tok::Bar, sp);
                    advance(1);
                }
                continue;
            case '<':
                if (i + 1 < src.size() && src[i + 1] == '-') {
                    push(Tok::Arrow, sp);
                    advance(2);
                } else {
                    push(Tok::Less, sp);
                    advance(1);
                }
                continue;
            case '=':
                if (i + 1 < src.size() && src[i + 1] == '>') {
                    push(Tok::FatArrow, sp);
                    advance(2);
                } else {
                    push(Tok::Equal, sp);
                    advance(1);
                }
                continue;
            default:
                res.errors.push_back({sp, fmt::format("unexpected character '{}'", c)});
                advance(1);
                continue;
        }
    }
    res.tokens.push_back({Tok::Eof, {}, 0, {line, col}});
    return res;
}

} // namespace ssl
