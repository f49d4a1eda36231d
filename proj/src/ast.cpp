#include "ssl/ast.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>

#include <fmt/format.h>

#include "ssl/order.hpp"

namespace ssl {

std::string render_diags(const Diags& diags, const std::string& file) {
    std::string out;
    for (const auto& d : diags) {
        if (d.span.line > 0)
            out += fmt::format("{}:{}:{}: error: {}\n", file, d.span.line, d.span.col, d.message);
        else
            out += fmt::format("{}: error: {}\n", file, d.message);
    }
    return out;
}

// Types ---------------------------------------------------------------------

TypePtr mk_internal(std::vector<TypeBranch> branches, Span span) {
    auto t = std::make_shared<Type>();
    t->kind = TypeKind::Internal;
    t->branches = std::move(branches);
    t->span = span;
    return t;
}

TypePtr mk_external(std::vector<TypeBranch> branches, Span span) {
    auto t = std::make_shared<Type>();
    t->kind = TypeKind::External;
    t->branches = std::move(branches);
    t->span = span;
    return t;
}

TypePtr mk_one(Span span) {
    auto t = std::make_shared<Type>();
    t->kind = TypeKind::One;
    t->span = span;
    return t;
}

TypePtr mk_var(std::string name, Span span) {
    auto t = std::make_shared<Type>();
    t->kind = TypeKind::Var;
    t->var = std::move(name);
    t->span = span;
    return t;
}

const TypeBranch* find_branch(const Type& t, const std::string& label) {
    for (const auto& b : t.branches)
        if (b.label == label)
            return &b;
    return nullptr;
}

bool type_identical(const TypePtr& a, const TypePtr& b) {
    if (a == b)
        return true;
    if (!a || !b || a->kind != b->kind)
        return false;
    switch (a->kind) {
        case TypeKind::One:
            return true;
        case TypeKind::Var:
            return a->var == b->var;
        case TypeKind::Internal:
        case TypeKind::External: {
            if (a->branches.size() != b->branches.size())
                return false;
            for (size_t i = 0; i < a->branches.size(); ++i) {
                if (a->branches[i].label != b->branches[i].label)
                    return false;
                if (!type_identical(a->branches[i].type, b->branches[i].type))
                    return false;
            }
            return true;
        }
    }
    return false;
}

// Signatures ----------------------------------------------------------------

const SigEntry* Signature::find(const std::string& name) const {
    for (const auto& e : entries)
        if (e.name == name)
            return &e;
    return nullptr;
}

int Signature::max_priority() const {
    int n = 0;
    for (const auto& e : entries)
        n = std::max(n, e.priority);
    return n;
}

std::vector<int> Signature::priorities() const {
    std::set<int> ps;
    for (const auto& e : entries)
        ps.insert(e.priority);
    return std::vector<int>(ps.begin(), ps.end());
}

std::optional<Polarity> Signature::polarity_at(int priority) const {
    for (const auto& e : entries)
        if (e.priority == priority)
            return e.polarity;
    return std::nullopt;
}

Polarity polarity_of(const Signature& sig, const std::string& name) {
    const SigEntry* e = sig.find(name);
    if (!e)
        throw std::out_of_range("polarity_of: unknown type name " + name);
    return e->polarity;
}

int priority_of(const Signature& sig, const std::string& name) {
    const SigEntry* e = sig.find(name);
    if (!e)
        throw std::out_of_range("priority_of: unknown type name " + name);
    return e->priority;
}

// Processes -----------------------------------------------------------------

bool proc_identical(const ProcPtr& a, const ProcPtr& b) {
    if (a == b)
        return true;
    if (!a || !b || a->kind != b->kind)
        return false;
    switch (a->kind) {
        case ProcKind::Forward:
        case ProcKind::CloseRight:
            return true;
        case ProcKind::WaitLeft:
            return proc_identical(a->cont, b->cont);
        case ProcKind::SendLabelRight:
        case ProcKind::SendLabelLeft:
            return a->label == b->label && proc_identical(a->cont, b->cont);
        case ProcKind::SendMuRight:
        case ProcKind::SendNuLeft:
        case ProcKind::CaseMuLeft:
        case ProcKind::CaseNuRight:
            return a->type_var == b->type_var && proc_identical(a->cont, b->cont);
        case ProcKind::CaseLeft:
        case ProcKind::CaseRight: {
            if (a->branches.size() != b->branches.size())
                return false;
            for (size_t i = 0; i < a->branches.size(); ++i) {
                if (a->branches[i].label != b->branches[i].label)
                    return false;
                if (!proc_identical(a->branches[i].body, b->branches[i].body))
                    return false;
            }
            return true;
        }
        case ProcKind::Cut:
            return a->cut_channel == b->cut_channel && type_identical(a->cut_type, b->cut_type) &&
                   proc_identical(a->cut_head, b->cut_head) && proc_identical(a->cut_tail, b->cut_tail);
        case ProcKind::Call:
            return a->callee == b->callee && a->call_arg == b->call_arg;
    }
    return false;
}

// Definitions and programs --------------------------------------------------

const ProcDef* Program::find_def(const std::string& name) const {
    for (const auto& d : defs)
        if (d.name == name)
            return &d;
    return nullptr;
}

static bool optional_type_identical(const std::optional<TypePtr>& a, const std::optional<TypePtr>& b) {
    if (a.has_value() != b.has_value())
        return false;
    return !a || type_identical(*a, *b);
}

bool program_identical(const Program& a, const Program& b) {
    if (a.sig.entries.size() != b.sig.entries.size())
        return false;
    for (size_t i = 0; i < a.sig.entries.size(); ++i) {
        const auto& x = a.sig.entries[i];
        const auto& y = b.sig.entries[i];
        if (x.name != y.name || x.priority != y.priority || x.polarity != y.polarity)
            return false;
        if (!type_identical(x.body, y.body))
            return false;
    }
    if (a.defs.size() != b.defs.size())
        return false;
    for (size_t i = 0; i < a.defs.size(); ++i) {
        const auto& x = a.defs[i];
        const auto& y = b.defs[i];
        if (x.name != y.name || !optional_type_identical(x.left, y.left) ||
            !type_identical(x.right, y.right) || !proc_identical(x.body, y.body))
            return false;
        if (x.left_port != y.left_port || x.right_port != y.right_port)
            return false;
    }
    if (a.orders.size() != b.orders.size())
        return false;
    for (size_t i = 0; i < a.orders.size(); ++i) {
        const auto& x = a.orders[i];
        const auto& y = b.orders[i];
        if (x.family != y.family || x.chains.size() != y.chains.size())
            return false;
        for (size_t j = 0; j < x.chains.size(); ++j)
            if (x.chains[j].names != y.chains[j].names || x.chains[j].rels != y.chains[j].rels)
                return false;
    }
    return a.main_name == b.main_name;
}

// Well-formedness -----------------------------------------------------------

static void walk_proc(const ProcPtr& p, const std::function<void(const Proc&)>& fn) {
    if (!p)
        return;
    fn(*p);
    if (p->cont)
        walk_proc(p->cont, fn);
    for (const auto& b : p->branches)
        walk_proc(b.body, fn);
    if (p->kind == ProcKind::Cut) {
        walk_proc(p->cut_head, fn);
        walk_proc(p->cut_tail, fn);
    }
}

static void check_type_names(const Signature& sig, const TypePtr& t, Diags& out) {
    if (!t)
        return;
    switch (t->kind) {
        case TypeKind::One:
            return;
        case TypeKind::Var:
            if (!sig.find(t->var))
                out.push_back({t->span, fmt::format("unknown type name '{}'", t->var)});
            return;
        case TypeKind::Internal:
        case TypeKind::External: {
            std::set<std::string> seen;
            for (const auto& b : t->branches) {
                if (!seen.insert(b.label).second)
                    out.push_back({t->span, fmt::format("duplicate label '{}' in choice", b.label)});
                check_type_names(sig, b.type, out);
            }
            return;
        }
    }
}

Diags validate_program(const Program& p) {
    Diags out;

    std::set<std::string> type_names;
    for (const auto& e : p.sig.entries) {
        if (!type_names.insert(e.name).second)
            out.push_back({e.span, fmt::format("duplicate type name '{}'", e.name)});
        if (e.priority < 1)
            out.push_back({e.span, "priority must be positive"});
    }
    for (const auto& e : p.sig.entries) {
        for (const auto& f : p.sig.entries) {
            if (&e < &f && e.priority == f.priority && e.polarity != f.polarity)
                out.push_back({f.span, fmt::format("types '{}' and '{}' share priority {} but differ in polarity",
                                                   e.name, f.name, e.priority)});
        }
    }
    for (const auto& e : p.sig.entries)
        check_type_names(p.sig, e.body, out);

    std::set<std::string> def_names;
    for (const auto& d : p.defs) {
        if (!def_names.insert(d.name).second)
            out.push_back({d.span, fmt::format("duplicate process name '{}'", d.name)});
        if (d.left)
            check_type_names(p.sig, *d.left, out);
        check_type_names(p.sig, d.right, out);
        walk_proc(d.body, [&](const Proc& n) {
            switch (n.kind) {
                case ProcKind::Cut:
                    check_type_names(p.sig, n.cut_type, out);
                    break;
                case ProcKind::SendMuRight:
                case ProcKind::CaseMuLeft:
                case ProcKind::SendNuLeft:
                case ProcKind::CaseNuRight:
                    if (!p.sig.find(n.type_var))
                        out.push_back({n.span, fmt::format("unknown type name '{}'", n.type_var)});
                    break;
                case ProcKind::Call:
                    if (!def_names.count(n.callee) && !p.find_def(n.callee))
                        out.push_back({n.span, fmt::format("unknown process '{}'", n.callee)});
                    break;
                default:
                    break;
            }
        });
    }

    if (p.main_name && !p.find_def(*p.main_name))
        out.push_back({p.main_span, fmt::format("main names unknown process '{}'", *p.main_name)});

    append(out, ProcOrder::build(p).errors);
    return out;
}

} // namespace ssl
