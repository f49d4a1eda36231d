#include "ssl/typecheck.hpp"

#include <fmt/core.h>

#include <map>

#include "ssl/printer.hpp"

namespace ssl {

bool types_equal(const TypePtr& a, const TypePtr& b) {
    if (a->kind != b->kind)
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
            std::map<std::string, TypePtr> lhs;
            for (const auto& br : a->branches)
                lhs[br.label] = br.type;
            for (const auto& br : b->branches) {
                auto it = lhs.find(br.label);
                if (it == lhs.end() || !types_equal(it->second, br.type))
                    return false;
            }
            return true;
        }
    }
    return false;
}

namespace {

// Reports the first failing rule application per branch: an error stops the
// walk of its own branch while sibling branches are still checked.
class Checker {
public:
    explicit Checker(const Program& prog) : prog_(prog) {}

    Diags check(const std::optional<TypePtr>& left, const TypePtr& right, const ProcPtr& p) {
        errs_.clear();
        visit(left, right, p);
        return std::move(errs_);
    }

private:
    const Program& prog_;
    Diags errs_;

    void err(Span sp, std::string msg) { errs_.push_back({sp, std::move(msg)}); }

    void visit(const std::optional<TypePtr>& left, const TypePtr& right, const ProcPtr& p) {
        switch (p->kind) {
            case ProcKind::Forward: {
                if (!left) {
                    err(p->span, "forward requires a left channel");
                    return;
                }
                if (!types_equal(*left, right))
                    err(p->span,
                        fmt::format("forward requires equal types on both sides, found {} and {}",
                                    print_type(*left), print_type(right)));
                return;
            }
            case ProcKind::Cut: {
                visit(left, p->cut_type, p->cut_head);
                visit(p->cut_type, right, p->cut_tail);
                return;
            }
            case ProcKind::SendLabelRight: {
                if (right->kind != TypeKind::Internal) {
                    err(p->span, fmt::format("cannot send label '{}' to the right at type {}",
                                             p->label, print_type(right)));
                    return;
                }
                const TypeBranch* br = find_branch(*right, p->label);
                if (!br) {
                    err(p->span, fmt::format("label '{}' is not offered by {}", p->label,
                                             print_type(right)));
                    return;
                }
                visit(left, br->type, p->cont);
                return;
            }
            case ProcKind::SendLabelLeft: {
                if (!left) {
                    err(p->span, "there is no left channel to send on");
                    return;
                }
                if ((*left)->kind != TypeKind::External) {
                    err(p->span, fmt::format("cannot send label '{}' to the left at type {}",
                                             p->label, print_type(*left)));
                    return;
                }
                const TypeBranch* br = find_branch(**left, p->label);
                if (!br) {
                    err(p->span, fmt::format("label '{}' is not offered by {}", p->label,
                                             print_type(*left)));
                    return;
                }
                visit(br->type, right, p->cont);
                return;
            }
            case ProcKind::CaseRight: {
                if (right->kind != TypeKind::External) {
                    err(p->span, fmt::format("cannot receive labels on the right at type {}",
                                             print_type(right)));
                    return;
                }
                check_branches(*p, *right, left, nullptr);
                return;
            }
            case ProcKind::CaseLeft: {
                if (!left) {
                    err(p->span, "there is no left channel to receive on");
                    return;
                }
                if ((*left)->kind != TypeKind::Internal) {
                    err(p->span, fmt::format("cannot receive labels on the left at type {}",
                                             print_type(*left)));
                    return;
                }
                check_branches(*p, **left, left, &right);
                return;
            }
            case ProcKind::CloseRight: {
                if (right->kind != TypeKind::One) {
                    err(p->span,
                        fmt::format("closeR requires the right type 1, found {}",
                                    print_type(right)));
                    return;
                }
                if (left)
                    err(p->span, "1R requires empty left context");
                return;
            }
            case ProcKind::WaitLeft: {
                if (!left) {
                    err(p->span, "there is no left channel to wait on");
                    return;
                }
                if ((*left)->kind != TypeKind::One) {
                    err(p->span, fmt::format("waitL requires the left type 1, found {}",
                                             print_type(*left)));
                    return;
                }
                visit(std::nullopt, right, p->cont);
                return;
            }
            case ProcKind::SendMuRight: {
                TypePtr body = unfold_at(p, right, "the right", Polarity::Mu);
                if (body)
                    visit(left, body, p->cont);
                return;
            }
            case ProcKind::CaseNuRight: {
                TypePtr body = unfold_at(p, right, "the right", Polarity::Nu);
                if (body)
                    visit(left, body, p->cont);
                return;
            }
            case ProcKind::CaseMuLeft: {
                if (!left) {
                    err(p->span, "there is no left channel to receive on");
                    return;
                }
                TypePtr body = unfold_at(p, *left, "the left", Polarity::Mu);
                if (body)
                    visit(body, right, p->cont);
                return;
            }
            case ProcKind::SendNuLeft: {
                if (!left) {
                    err(p->span, "there is no left channel to send on");
                    return;
                }
                TypePtr body = unfold_at(p, *left, "the left", Polarity::Nu);
                if (body)
                    visit(body, right, p->cont);
                return;
            }
            case ProcKind::Call: {
                const ProcDef* callee = prog_.find_def(p->callee);
                if (!callee) {
                    err(p->span, fmt::format("unknown process '{}'", p->callee));
                    return;
                }
                if (callee->left && !left) {
                    err(p->span,
                        fmt::format("call needs a left channel of type {} but the left context "
                                    "is empty",
                                    print_type(*callee->left)));
                    return;
                }
                if (!callee->left && left) {
                    err(p->span,
                        fmt::format("call requires an empty left context but the left channel "
                                    "has type {}",
                                    print_type(*left)));
                    return;
                }
                if (callee->left && left && !types_equal(*callee->left, *left)) {
                    err(p->span, fmt::format("call expects {} on the left, found {}",
                                             print_type(*callee->left), print_type(*left)));
                    return;
                }
                if (!types_equal(right, callee->right))
                    err(p->span, fmt::format("branch continues at type {} but calls at {}",
                                             print_type(right), print_type(callee->right)));
                return;
            }
        }
    }

    // Exactly one of fixed_right / fixed_left is set: the side the case does
    // not consume keeps its type across every branch.
    // fixed_right set: receiving on the left, branch type becomes the left.
    // fixed_right null: receiving on the right, branch type becomes the right.
    void check_branches(const Proc& p, const Type& choice, const std::optional<TypePtr>& left,
                        const TypePtr* fixed_right) {
        std::map<std::string, const ProcBranch*> offered;
        for (const auto& br : p.branches)
            offered[br.label] = &br;
        for (const auto& tb : choice.branches) {
            auto it = offered.find(tb.label);
            if (it == offered.end()) {
                err(p.span, fmt::format("case is missing label '{}' required by {}", tb.label,
                                        print_type(choice)));
                continue;
            }
            if (fixed_right)
                visit(tb.type, *fixed_right, it->second->body);
            else
                visit(left, tb.type, it->second->body);
        }
        for (const auto& br : p.branches)
            if (!find_branch(choice, br.label))
                err(br.span, fmt::format("label '{}' is not offered by {}", br.label,
                                         print_type(choice)));
    }

    // Checks that ty is the name the unfold mentions, with the polarity the
    // construct demands; returns the unfolded body, or null after an error.
    TypePtr unfold_at(const ProcPtr& p, const TypePtr& ty, const char* side, Polarity want) {
        const char* written = want == Polarity::Mu ? "mu" : "nu";
        if (ty->kind != TypeKind::Var) {
            err(p->span, fmt::format("cannot unfold {}_{} at type {}: {} type is not a type name",
                                     written, p->type_var, print_type(ty), side));
            return nullptr;
        }
        if (ty->var != p->type_var) {
            err(p->span, fmt::format("unfold names '{}' but {} type is '{}'", p->type_var, side,
                                     ty->var));
            return nullptr;
        }
        const SigEntry* entry = prog_.sig.find(ty->var);
        if (!entry) {
            err(p->span, fmt::format("unknown type name '{}'", ty->var));
            return nullptr;
        }
        if (entry->polarity != want) {
            err(p->span,
                fmt::format("'{}' is a {} fixed point; it unfolds with {}, not {}", ty->var,
                            entry->polarity == Polarity::Mu ? "least" : "greatest",
                            entry->polarity == Polarity::Mu ? "mu" : "nu", written));
            return nullptr;
        }
        return entry->body;
    }
};

} // namespace

Diags check_process(const Program& prog, const std::optional<TypePtr>& left,
                    const TypePtr& right, const ProcPtr& proc) {
    return Checker(prog).check(left, right, proc);
}

Diags check_def(const Program& prog, const ProcDef& def) {
    return check_process(prog, def.left, def.right, def.body);
}

Diags check_program(const Program& prog) {
    Diags out = validate_program(prog);
    if (!out.empty())
        return out;
    for (const auto& def : prog.defs)
        append(out, check_def(prog, def));
    return out;
}

} // namespace ssl
