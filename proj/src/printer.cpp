#include "ssl/printer.hpp"

#include <fmt/core.h>

namespace ssl {

namespace {

void type_to(std::string& out, const Type& t) {
    switch (t.kind) {
        case TypeKind::One:
            out += "1";
            return;
        case TypeKind::Var:
            out += t.var;
            return;
        case TypeKind::Internal:
        case TypeKind::External: {
            out += t.kind == TypeKind::Internal ? "+{" : "&{";
            bool first = true;
            for (const auto& b : t.branches) {
                if (!first)
                    out += ", ";
                first = false;
                out += b.label;
                out += " : ";
                type_to(out, *b.type);
            }
            out += "}";
            return;
        }
    }
}

// A process is simple when it renders naturally on one line: a chain of
// unary steps ending in closeR, fwd, or a call, with no branching case and
// no cut along the way.
bool is_simple(const ProcPtr& p) {
    switch (p->kind) {
        case ProcKind::Forward:
        case ProcKind::CloseRight:
        case ProcKind::Call:
            return true;
        case ProcKind::SendLabelRight:
        case ProcKind::SendLabelLeft:
        case ProcKind::SendMuRight:
        case ProcKind::SendNuLeft:
        case ProcKind::WaitLeft:
        case ProcKind::CaseMuLeft:
        case ProcKind::CaseNuRight:
            return is_simple(p->cont);
        case ProcKind::CaseLeft:
        case ProcKind::CaseRight:
        case ProcKind::Cut:
            return false;
    }
    return false;
}

void flat_to(std::string& out, const ProcPtr& p) {
    switch (p->kind) {
        case ProcKind::Forward:
            out += "fwd";
            return;
        case ProcKind::CloseRight:
            out += "closeR";
            return;
        case ProcKind::Call:
            out += "call ";
            out += p->callee;
            if (p->call_arg) {
                out += " ";
                out += *p->call_arg;
            }
            return;
        case ProcKind::SendLabelRight:
            out += fmt::format("R.{}; ", p->label);
            flat_to(out, p->cont);
            return;
        case ProcKind::SendLabelLeft:
            out += fmt::format("L.{}; ", p->label);
            flat_to(out, p->cont);
            return;
        case ProcKind::SendMuRight:
            out += fmt::format("R.mu_{}; ", p->type_var);
            flat_to(out, p->cont);
            return;
        case ProcKind::SendNuLeft:
            out += fmt::format("L.nu_{}; ", p->type_var);
            flat_to(out, p->cont);
            return;
        case ProcKind::WaitLeft:
            out += "waitL; ";
            flat_to(out, p->cont);
            return;
        case ProcKind::CaseMuLeft:
            out += fmt::format("caseL(mu_{} => ", p->type_var);
            flat_to(out, p->cont);
            out += ")";
            return;
        case ProcKind::CaseNuRight:
            out += fmt::format("caseR(nu_{} => ", p->type_var);
            flat_to(out, p->cont);
            out += ")";
            return;
        case ProcKind::CaseLeft:
        case ProcKind::CaseRight: {
            out += p->kind == ProcKind::CaseLeft ? "caseL(" : "caseR(";
            bool first = true;
            for (const auto& b : p->branches) {
                if (!first)
                    out += " | ";
                first = false;
                out += b.label;
                out += " => ";
                flat_to(out, b.body);
            }
            out += ")";
            return;
        }
        case ProcKind::Cut: {
            out += p->cut_channel;
            out += " : ";
            type_to(out, *p->cut_type);
            out += " <- ";
            if (p->cut_head->kind == ProcKind::Call) {
                flat_to(out, p->cut_head);
            } else {
                out += "(";
                flat_to(out, p->cut_head);
                out += ")";
            }
            out += " ; ";
            flat_to(out, p->cut_tail);
            return;
        }
    }
}

class ProgramPrinter {
public:
    std::string render(const Program& prog) {
        for (const auto& entry : prog.sig.entries) {
            std::string body;
            type_to(body, *entry.body);
            line(0, fmt::format("type {} =[{}] {} {}", entry.name, entry.priority,
                                entry.polarity == Polarity::Mu ? "mu" : "nu", body));
        }
        for (const auto& def : prog.defs) {
            if (!out_.empty())
                out_ += "\n";
            std::string left = def.left ? print_type(*def.left) : ".";
            line(0, fmt::format("proc {} : {} |- {} =", def.name, left,
                                print_type(def.right)));
            proc_to(def.body, 4, "");
        }
        if (!prog.orders.empty() && !out_.empty())
            out_ += "\n";
        for (const auto& decl : prog.orders) {
            std::string chains;
            bool first_chain = true;
            for (const auto& chain : decl.chains) {
                if (!first_chain)
                    chains += ", ";
                first_chain = false;
                chains += chain.names[0];
                for (size_t i = 0; i + 1 < chain.names.size(); ++i)
                    chains += fmt::format(" {} {}",
                                          chain.rels[i] == OrderRel::Less ? "<" : "~",
                                          chain.names[i + 1]);
            }
            line(0, fmt::format("order[{}] {}", decl.family, chains));
        }
        if (prog.main_name) {
            if (!out_.empty())
                out_ += "\n";
            line(0, fmt::format("main {}", *prog.main_name));
        }
        return std::move(out_);
    }

private:
    std::string out_;

    void line(int indent, const std::string& text) {
        out_.append(static_cast<size_t>(indent), ' ');
        out_ += text;
        out_ += "\n";
    }

    // prefix holds the unary steps already committed to the current line.
    void proc_to(const ProcPtr& p, int indent, std::string prefix) {
        if (is_simple(p)) {
            std::string flat;
            flat_to(flat, p);
            line(indent, prefix + flat);
            return;
        }
        switch (p->kind) {
            case ProcKind::SendLabelRight:
                proc_to(p->cont, indent, prefix + fmt::format("R.{}; ", p->label));
                return;
            case ProcKind::SendLabelLeft:
                proc_to(p->cont, indent, prefix + fmt::format("L.{}; ", p->label));
                return;
            case ProcKind::SendMuRight:
                proc_to(p->cont, indent, prefix + fmt::format("R.mu_{}; ", p->type_var));
                return;
            case ProcKind::SendNuLeft:
                proc_to(p->cont, indent, prefix + fmt::format("L.nu_{}; ", p->type_var));
                return;
            case ProcKind::WaitLeft:
                proc_to(p->cont, indent, prefix + "waitL; ");
                return;
            case ProcKind::CaseMuLeft:
            case ProcKind::CaseNuRight: {
                const char* head = p->kind == ProcKind::CaseMuLeft ? "caseL(mu_" : "caseR(nu_";
                line(indent, prefix + fmt::format("{}{} =>", head, p->type_var));
                proc_to(p->cont, indent + 4, "");
                line(indent, ")");
                return;
            }
            case ProcKind::CaseLeft:
            case ProcKind::CaseRight: {
                line(indent, prefix + (p->kind == ProcKind::CaseLeft ? "caseL(" : "caseR("));
                bool first = true;
                for (const auto& b : p->branches) {
                    std::string lead = first ? "" : "| ";
                    first = false;
                    if (is_simple(b.body)) {
                        std::string flat;
                        flat_to(flat, b.body);
                        line(indent + 4, fmt::format("{}{} => {}", lead, b.label, flat));
                    } else {
                        line(indent + 4, fmt::format("{}{} =>", lead, b.label));
                        proc_to(b.body, indent + 8, "");
                    }
                }
                line(indent, ")");
                return;
            }
            case ProcKind::Cut: {
                std::string ann =
                    fmt::format("{} : {} <- ", p->cut_channel, print_type(p->cut_type));
                if (p->cut_head->kind == ProcKind::Call) {
                    std::string flat;
                    flat_to(flat, p->cut_head);
                    line(indent, prefix + ann + flat + " ;");
                } else if (is_simple(p->cut_head)) {
                    std::string flat;
                    flat_to(flat, p->cut_head);
                    line(indent, prefix + ann + "(" + flat + ") ;");
                } else {
                    line(indent, prefix + ann + "(");
                    proc_to(p->cut_head, indent + 4, "");
                    line(indent, ") ;");
                }
                proc_to(p->cut_tail, indent, "");
                return;
            }
            default:
                // Simple kinds were handled above.
                return;
        }
    }
};

} // namespace

std::string print_type(const Type& t) {
    std::string out;
    type_to(out, t);
    return out;
}

std::string print_type(const TypePtr& t) {
    return print_type(*t);
}

std::string print_process_flat(const ProcPtr& p) {
    std::string out;
    flat_to(out, p);
    return out;
}

std::string print_program(const Program& p) {
    return ProgramPrinter().render(p);
}

} // namespace ssl
