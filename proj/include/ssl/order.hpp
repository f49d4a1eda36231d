#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ssl/ast.hpp"

namespace ssl {

// A channel at a specific generation: x^gen.
struct GenChannel {
    std::string base;
    int gen = 0;

    bool operator==(const GenChannel& o) const { return base == o.base && gen == o.gen; }
};

// One tracked quantity: channel base, generation, priority slot.
struct OrderVar {
    std::string base;
    int gen = 0;
    int priority = 0;

    bool operator==(const OrderVar& o) const {
        return base == o.base && gen == o.gen && priority == o.priority;
    }
    bool operator<(const OrderVar& o) const {
        if (base != o.base) return base < o.base;
        if (gen != o.gen) return gen < o.gen;
        return priority < o.priority;
    }
};

std::string to_string(const OrderVar& v);

// Store of equalities and strict inequalities between generation variables.
// Equalities are merged eagerly (union-find); strict facts are directed
// edges between classes. Entailment of a < b is reachability through at
// least one edge. Inserting a relation that would make some a < a throws
// std::logic_error: the traversal never produces one, so a cycle is an
// internal bug, not user error.
class Omega {
public:
    struct Entry {
        bool strict = false; // false: a = b, true: a < b
        OrderVar a, b;
    };

    void add_eq(const OrderVar& a, const OrderVar& b);
    void add_lt(const OrderVar& a, const OrderVar& b);

    bool entails_eq(const OrderVar& a, const OrderVar& b) const;
    bool entails_lt(const OrderVar& a, const OrderVar& b) const;
    bool entails_le(const OrderVar& a, const OrderVar& b) const;

    // True if any recorded relation mentions a variable with this base name.
    bool mentions(const std::string& base) const;

    // Append-only history of added relations, in insertion order.
    const std::vector<Entry>& log() const { return log_; }

private:
    int intern(const OrderVar& v);
    int find(int i) const;
    bool reachable(int from, int to) const; // >= 1 strict edge

    std::map<OrderVar, int> ids_;
    std::vector<OrderVar> vars_;
    mutable std::vector<int> parent_;
    std::vector<int> rank_;
    std::map<int, std::set<int>> succ_; // class root -> strictly greater roots
    std::vector<Entry> log_;
};

// Channel lists -------------------------------------------------------------

struct ListSlot {
    bool present = false;
    OrderVar var;
};

// One pair per present priority; the slot of the side that *receives* the
// unfolding message comes first.
struct ListPair {
    int priority = 0;
    ListSlot receiver, sender;
};

struct ChannelList {
    std::vector<ListPair> pairs; // ascending priority
};

ChannelList build_list(const Signature& sig, const std::optional<GenChannel>& left,
                       const GenChannel& right);

std::vector<ListSlot> flatten(const ChannelList& l);
// Prefix cropped just before the sender slot of priority j: whole pairs
// below j, then only the receiver slot of j (when j is present). j = 0
// yields the empty prefix.
std::vector<ListSlot> flatten_prefix(const ChannelList& l, int j);

std::string to_string(const std::vector<ListSlot>& slots);

// Le means every position compared equal (weakly smaller but not strictly);
// Lt is a strict win at the first non-equal position.
enum class LexResult { Lt, Le, Incomparable };

LexResult lex_compare(const Omega& om, const std::vector<ListSlot>& a,
                      const std::vector<ListSlot>& b);

// Process variable order ----------------------------------------------------

// Family-indexed partial orders over process names, as declared by `order`
// lines. Names never mentioned form singleton families at index 0.
class ProcOrder {
public:
    enum class Rel {
        Subset, // X strictly below Y in their shared family
        Cong,   // X and Y equivalent (includes X == Y)
        Other,  // everything else
    };

    struct BuildResult;
    static BuildResult build(const Program& p);

    int family_of(const std::string& name) const;
    Rel rel(const std::string& x, const std::string& y) const;

private:
    int class_of(const std::string& name) const; // -1 if undeclared
    std::map<std::string, int> family_;
    std::map<std::string, int> cls_;          // name -> equivalence class id
    std::map<int, std::set<int>> cls_less_;   // class -> strictly greater classes, closed
};

struct ProcOrder::BuildResult {
    ProcOrder order;
    Diags errors;
};

// Combined order ------------------------------------------------------------

struct CallChannels {
    std::string name;
    std::optional<GenChannel> left;
    GenChannel right;
};

struct CombinedResult {
    bool ok = false;
    int clause = 0; // 1, 2, or 3
    LexResult cmp = LexResult::Incomparable;
    int prefix_at = -1; // priority index the prefixes were cropped at (clauses 1/3)
};

// Decides callee (F, list) < root (G, list) in the combined order:
//   1. F strictly below G in family i: prefix at i must be <=,
//   2. F congruent to G: the full lists must compare strictly,
//   3. otherwise: strict comparison of prefixes at min(i, j).
CombinedResult combined_less(const Signature& sig, const ProcOrder& order, const Omega& om,
                             const CallChannels& callee, const CallChannels& root);

} // namespace ssl
