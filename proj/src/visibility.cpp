#include "ssl/visibility.hpp"

#include <string>

namespace ssl {

static void visit(const Signature& sig, const TypePtr& t, std::set<std::string>& seen,
                  std::set<int>& out) {
    if (!t)
        return;
    switch (t->kind) {
        case TypeKind::One:
            return;
        case TypeKind::Internal:
        case TypeKind::External:
            for (const auto& b : t->branches)
                visit(sig, b.type, seen, out);
            return;
        case TypeKind::Var: {
            const SigEntry* e = sig.find(t->var);
            if (!e)
                return; // validated elsewhere
            out.insert(e->priority);
            if (seen.insert(t->var).second)
                visit(sig, e->body, seen, out);
            return;
        }
    }
}

std::set<int> visible_priorities(const Signature& sig, const TypePtr& t) {
    std::set<std::string> seen;
    std::set<int> out;
    visit(sig, t, seen, out);
    return out;
}

} // namespace ssl
