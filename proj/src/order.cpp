#include "ssl/order.hpp"

#include <cassert>
#include <deque>
#include <functional>
#include <stdexcept>

#include <fmt/format.h>

namespace ssl {

std::string to_string(const OrderVar& v) {
    return fmt::format("{}^{}_{}", v.base, v.gen, v.priority);
}

// Omega ----------------------------------------------------------------------

int Omega::intern(const OrderVar& v) {
    auto it = ids_.find(v);
    if (it != ids_.end())
        return it->second;
    int id = static_cast<int>(vars_.size());
    ids_.emplace(v, id);
    vars_.push_back(v);
    parent_.push_back(id);
    rank_.push_back(0);
    return id;
}

int Omega::find(int i) const {
    while (parent_[i] != i) {
        parent_[i] = parent_[parent_[i]]; // path halving
        i = parent_[i];
    }
    return i;
}

bool Omega::reachable(int from, int to) const {
    std::deque<int> frontier{from};
    std::set<int> seen;
    while (!frontier.empty()) {
        int cur = frontier.front();
        frontier.pop_front();
        auto it = succ_.find(cur);
        if (it == succ_.end())
            continue;
        for (int raw : it->second) {
            int nxt = find(raw);
            if (nxt == to)
                return true;
            if (seen.insert(nxt).second)
                frontier.push_back(nxt);
        }
    }
    return false;
}

void Omega::add_eq(const OrderVar& a, const OrderVar& b) {
    if (entails_lt(a, b) || entails_lt(b, a))
        throw std::logic_error(fmt::format("order store: equating strictly ordered {} and {}",
                                           to_string(a), to_string(b)));
    int ra = find(intern(a));
    int rb = find(intern(b));
    log_.push_back({false, a, b});
    if (ra == rb)
        return;
    if (rank_[ra] < rank_[rb])
        std::swap(ra, rb);
    parent_[rb] = ra;
    if (rank_[ra] == rank_[rb])
        ++rank_[ra];
    auto it = succ_.find(rb);
    if (it != succ_.end()) {
        succ_[ra].insert(it->second.begin(), it->second.end());
        succ_.erase(it);
    }
}

void Omega::add_lt(const OrderVar& a, const OrderVar& b) {
    if (entails_le(b, a))
        throw std::logic_error(fmt::format("order store: cycle adding {} < {}",
                                           to_string(a), to_string(b)));
    int ra = find(intern(a));
    int rb = find(intern(b));
    succ_[ra].insert(rb);
    log_.push_back({true, a, b});
}

bool Omega::entails_eq(const OrderVar& a, const OrderVar& b) const {
    if (a == b)
        return true;
    auto ia = ids_.find(a);
    auto ib = ids_.find(b);
    if (ia == ids_.end() || ib == ids_.end())
        return false;
    return find(ia->second) == find(ib->second);
}

bool Omega::entails_lt(const OrderVar& a, const OrderVar& b) const {
    auto ia = ids_.find(a);
    auto ib = ids_.find(b);
    if (ia == ids_.end() || ib == ids_.end())
        return false;
    return reachable(find(ia->second), find(ib->second));
}

bool Omega::entails_le(const OrderVar& a, const OrderVar& b) const {
    return entails_eq(a, b) || entails_lt(a, b);
}

bool Omega::mentions(const std::string& base) const {
    for (const auto& [v, id] : ids_) {
        (void)id;
        if (v.base == base)
            return true;
    }
    return false;
}

// Channel lists --------------------------------------------------------------

ChannelList build_list(const Signature& sig, const std::optional<GenChannel>& left,
                       const GenChannel& right) {
    ChannelList out;
    for (int pr : sig.priorities()) {
        ListPair pair;
        pair.priority = pr;
        ListSlot lslot, rslot;
        if (left) {
            lslot.present = true;
            lslot.var = {left->base, left->gen, pr};
        }
        rslot.present = true;
        rslot.var = {right.base, right.gen, pr};
        // mu unfoldings travel rightward (left receives them), nu leftward.
        if (*sig.polarity_at(pr) == Polarity::Mu) {
            pair.receiver = lslot;
            pair.sender = rslot;
        } else {
            pair.receiver = rslot;
            pair.sender = lslot;
        }
        out.pairs.push_back(pair);
    }
    return out;
}

std::vector<ListSlot> flatten(const ChannelList& l) {
    std::vector<ListSlot> out;
    for (const auto& p : l.pairs) {
        out.push_back(p.receiver);
        out.push_back(p.sender);
    }
    return out;
}

std::vector<ListSlot> flatten_prefix(const ChannelList& l, int j) {
    std::vector<ListSlot> out;
    if (j <= 0)
        return out;
    for (const auto& p : l.pairs) {
        if (p.priority < j) {
            out.push_back(p.receiver);
            out.push_back(p.sender);
        } else if (p.priority == j) {
            out.push_back(p.receiver);
        }
    }
    return out;
}

std::string to_string(const std::vector<ListSlot>& slots) {
    std::string out = "[";
    for (size_t i = 0; i < slots.size(); ++i) {
        if (i)
            out += ", ";
        out += slots[i].present ? to_string(slots[i].var) : "_";
    }
    return out + "]";
}

LexResult lex_compare(const Omega& om, const std::vector<ListSlot>& a,
                      const std::vector<ListSlot>& b) {
    assert(a.size() == b.size() && "lists over one signature have equal shape");
    for (size_t i = 0; i < a.size(); ++i) {
        if (!a[i].present && !b[i].present)
            continue; // both absent: equal slot
        if (a[i].present != b[i].present)
            return LexResult::Incomparable;
        if (om.entails_eq(a[i].var, b[i].var))
            continue;
        if (om.entails_lt(a[i].var, b[i].var))
            return LexResult::Lt;
        return LexResult::Incomparable;
    }
    return LexResult::Le;
}

// ProcOrder ------------------------------------------------------------------

ProcOrder::BuildResult ProcOrder::build(const Program& p) {
    BuildResult res;
    ProcOrder& ord = res.order;
    Diags& errs = res.errors;

    int max_pr = p.sig.max_priority();
    // Union-find over declared names for ~ chains.
    std::map<std::string, std::string> uf;
    std::function<std::string(const std::string&)> find = [&](const std::string& x) {
        auto it = uf.find(x);
        if (it->second == x)
            return x;
        it->second = find(it->second);
        return it->second;
    };
    std::vector<std::pair<std::string, std::string>> less_pairs;

    auto declare = [&](const std::string& name, int family, Span span) {
        if (!p.find_def(name)) {
            errs.push_back({span, fmt::format("order declaration names unknown process '{}'", name)});
            return;
        }
        auto it = ord.family_.find(name);
        if (it != ord.family_.end()) {
            if (it->second != family)
                errs.push_back({span, fmt::format("process '{}' appears in more than one order family",
                                                  name)});
            return;
        }
        ord.family_[name] = family;
        uf.emplace(name, name);
    };

    for (const auto& decl : p.orders) {
        if (decl.family < 0 || decl.family > max_pr)
            errs.push_back({decl.span, fmt::format("order family index {} out of range (highest priority is {})",
                                                   decl.family, max_pr)});
        for (const auto& chain : decl.chains) {
            for (const auto& n : chain.names)
                declare(n, decl.family, chain.span);
            for (size_t i = 0; i + 1 < chain.names.size(); ++i) {
                const std::string& a = chain.names[i];
                const std::string& b = chain.names[i + 1];
                if (!ord.family_.count(a) || !ord.family_.count(b))
                    continue; // unknown name already reported
                if (chain.rels[i] == OrderRel::Equiv) {
                    std::string ra = find(a), rb = find(b);
                    if (ra != rb)
                        uf[ra] = rb;
                } else {
                    less_pairs.emplace_back(a, b);
                }
            }
        }
    }
    if (!errs.empty())
        return res;

    // Number the equivalence classes and transitively close the strict pairs.
    std::map<std::string, int> class_id;
    int next = 0;
    for (const auto& [name, fam] : ord.family_) {
        (void)fam;
        std::string root = find(name);
        auto it = class_id.find(root);
        if (it == class_id.end())
            it = class_id.emplace(root, next++).first;
        ord.cls_[name] = it->second;
    }
    for (const auto& [a, b] : less_pairs)
        ord.cls_less_[ord.cls_[a]].insert(ord.cls_[b]);
    bool changed = true;
    while (changed) {
        changed = false;
        for (auto& [c, above] : ord.cls_less_) {
            std::set<int> add;
            for (int m : above) {
                auto it = ord.cls_less_.find(m);
                if (it != ord.cls_less_.end())
                    for (int u : it->second)
                        if (!above.count(u))
                            add.insert(u);
            }
            if (!add.empty()) {
                above.insert(add.begin(), add.end());
                changed = true;
            }
        }
    }
    for (const auto& [c, above] : ord.cls_less_) {
        if (above.count(c)) {
            errs.push_back({{}, "order relation is not antisymmetric: a process is strictly below itself"});
            break;
        }
    }
    return res;
}

int ProcOrder::family_of(const std::string& name) const {
    auto it = family_.find(name);
    return it == family_.end() ? 0 : it->second;
}

int ProcOrder::class_of(const std::string& name) const {
    auto it = cls_.find(name);
    return it == cls_.end() ? -1 : it->second;
}

ProcOrder::Rel ProcOrder::rel(const std::string& x, const std::string& y) const {
    if (x == y)
        return Rel::Cong;
    int cx = class_of(x);
    int cy = class_of(y);
    if (cx < 0 || cy < 0)
        return Rel::Other; // some undeclared singleton, necessarily distinct
    if (family_of(x) != family_of(y))
        return Rel::Other;
    if (cx == cy)
        return Rel::Cong;
    auto it = cls_less_.find(cx);
    if (it != cls_less_.end() && it->second.count(cy))
        return Rel::Subset;
    return Rel::Other;
}

// Combined order -------------------------------------------------------------

CombinedResult combined_less(const Signature& sig, const ProcOrder& order, const Omega& om,
                             const CallChannels& callee, const CallChannels& root) {
    CombinedResult res;
    ChannelList cl = build_list(sig, callee.left, callee.right);
    ChannelList rl = build_list(sig, root.left, root.right);
    int fi = order.family_of(callee.name);
    int fj = order.family_of(root.name);
    switch (order.rel(callee.name, root.name)) {
        case ProcOrder::Rel::Subset:
            res.clause = 1;
            res.prefix_at = fi;
            res.cmp = lex_compare(om, flatten_prefix(cl, fi), flatten_prefix(rl, fi));
            res.ok = res.cmp != LexResult::Incomparable;
            break;
        case ProcOrder::Rel::Cong:
            res.clause = 2;
            res.cmp = lex_compare(om, flatten(cl), flatten(rl));
            res.ok = res.cmp == LexResult::Lt;
            break;
        case ProcOrder::Rel::Other:
            res.clause = 3;
            res.prefix_at = std::min(fi, fj);
            res.cmp = lex_compare(om, flatten_prefix(cl, res.prefix_at), flatten_prefix(rl, res.prefix_at));
            res.ok = res.cmp == LexResult::Lt;
            break;
    }
    return res;
}

} // namespace ssl
