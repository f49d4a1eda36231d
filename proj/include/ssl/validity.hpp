#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ssl/ast.hpp"
#include "ssl/order.hpp"

namespace ssl {

struct FailingCall {
    std::string callee;
    Span span;
    int clause = 0;     // combined-order clause that applied at the call
    std::string reason; // why the required descent did not hold
};

struct DefVerdict {
    std::string name;
    bool valid = true;
    std::vector<FailingCall> failing;
};

struct ValidityReport {
    std::vector<DefVerdict> defs; // one per definition, in program order

    bool all_valid() const;
    const DefVerdict* find(const std::string& name) const;
};

// Hooks into the traversal, for trace renderers. on_step fires once per
// construct after its store update has been applied; push/pop bracket each
// case branch and each cut premise.
class ValidityObserver {
public:
    virtual ~ValidityObserver() = default;
    virtual void on_def(const ProcDef&) {}
    virtual void on_step(const Proc&, const std::optional<GenChannel>&, const GenChannel&,
                         const Omega&) {}
    virtual void on_push() {}
    virtual void on_pop() {}
    virtual void on_branch(const Proc&, const std::string&) {}
    virtual void on_cut_half(const Proc&, bool) {}
    virtual void on_call(const Proc&, const CombinedResult&, const CallChannels&,
                         const CallChannels&) {}
};

// Walks one definition from generation start_gen with an empty store,
// checking every call against the snapshot taken at the root. The verdict
// does not depend on start_gen; tests rely on that stability.
DefVerdict check_def_validity(const Program& prog, const ProcOrder& order, const ProcDef& def,
                              int start_gen = 0, ValidityObserver* obs = nullptr);

// Requires check_program(prog) to have passed.
ValidityReport check_validity(const Program& prog, int start_gen = 0,
                              ValidityObserver* obs = nullptr);

} // namespace ssl
