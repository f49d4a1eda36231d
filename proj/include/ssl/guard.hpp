#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ssl/ast.hpp"
#include "ssl/order.hpp"

namespace ssl {

struct DerivChannel {
    GenChannel chan;
    TypePtr type;
};

// One judgment of the unfolded derivation: the process against its channel
// endpoints, with the store the judgment holds under. Stores only grow from
// parent to child.
struct DerivNode {
    std::optional<DerivChannel> left;
    DerivChannel right;
    ProcPtr proc;
    Omega omega;
    std::string rule; // id, cut, +R, +L, &R, &L, 1R, 1L, muR, muL, nuR, nuL, def
    std::vector<DerivNode> children;
};

// A pair of call judgments of the same process variable, one an ancestor of
// the other.
struct Cycle {
    const DerivNode* start = nullptr;
    const DerivNode* end = nullptr;
    std::string callee;
    std::vector<std::string> path; // rules from just below start down to end
};

enum class CycleClass { LeftMuTrace, RightNuTrace, Both, Neither };

const char* to_string(CycleClass c);

// Expands the derivation for one definition, spending one unit of depth per
// definition expansion; the root call's own expansion costs the first unit,
// so depth 0 yields a single unexpanded node.
DerivNode unfold(const Program& p, const std::string& def, int depth);

std::vector<Cycle> find_cycles(const DerivNode& root);

// A cycle is a left mu-trace when the left channel persists by name across
// it and its priority-indexed list strictly decreases under the end store;
// a right nu-trace when the right list strictly decreases (the right channel
// may change name across a cut, with the store bridging the two).
CycleClass classify_cycle(const Signature& sig, const Cycle& c);

struct CycleInfo {
    std::string callee;
    std::string start_left, start_right; // rendered endpoints, "" for absent
    std::string end_left, end_right;
    size_t length = 0; // rules between the two judgments
    CycleClass cls = CycleClass::Neither;
};

struct DefGuard {
    std::string name;
    bool guarded = true; // every cycle is a left mu- or right nu-trace
    std::vector<CycleInfo> cycles;
};

struct GuardReport {
    int depth = 0;
    std::vector<DefGuard> defs;

    bool all_guarded() const;
};

// Bounded semi-check: unfold every definition to the depth bound and
// classify every cycle found.
GuardReport check_guard(const Program& p, int depth);

} // namespace ssl
