#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ssl/ast.hpp"

namespace ssl {

// A junction between adjacent processes, or an external boundary channel,
// together with its current session type. Junction types evolve as
// messages cross them; external types only ever sit and wait.
struct Endpoint {
    std::string name;
    TypePtr type;
};

struct RunProc {
    ProcPtr code; // current continuation; channels are positional
};

// An ordered chain of processes. procs[i] talks to procs[i+1] across
// junctions[i]; the outermost sides are the external endpoints. Adjacency
// is meaningful: composition is associative but not commutative. An empty
// configuration (the unit of composition) has no endpoints at all.
struct Configuration {
    Program program;
    std::vector<RunProc> procs;
    std::vector<Endpoint> junctions; // procs.size() - 1 when procs is nonempty
    std::optional<Endpoint> ext_left;
    std::optional<Endpoint> ext_right; // present iff procs is nonempty
    long name_counter = 0;             // fresh junction names

    bool empty() const { return procs.empty(); }
};

// Single-process configuration for one definition; load uses the program's
// main. Both require a typechecked program.
Configuration load_def(const Program& p, const std::string& name);
Configuration load(const Program& p);

struct ComposeResult {
    std::optional<Configuration> config; // set iff errors is empty
    Diags errors;
};

// Joins two configurations at a fresh junction typed by the seam. The
// programs are merged; shared names must agree.
ComposeResult compose(const Configuration& a, const Configuration& b);

struct StepInfo {
    std::string rule;     // fwd, spawn, def, label_r, label_l, close, mu_r, nu_l
    std::string junction; // junction the step touched (fresh name for fwd/spawn)
    std::string payload;  // label, mu_t / nu_t, close, or callee for def
};

// Applies the leftmost enabled transition in place; nullopt means no redex.
std::optional<StepInfo> step(Configuration& c);

struct TraceStep {
    int index = 0;
    std::string rule, junction, payload;
};

enum class RunStatus {
    EmptyConfig,
    ExternalPoised,
    FuelExhausted,
    StuckError, // contradicts progress: an implementation bug, not a program state
};

struct RunOutcome {
    RunStatus status = RunStatus::EmptyConfig;
    std::string side;   // ExternalPoised: "left" or "right"
    std::string action; // ExternalPoised head action; StuckError description
    int steps = 0;
    std::vector<TraceStep> trace;
};

RunOutcome run(Configuration c, int fuel);

// Re-typechecks every process against its neighboring endpoint types.
Diags typecheck_configuration(const Configuration& c);

struct PreservationResult {
    bool ok = true;
    std::string detail;
};

// after must be one step from before; checks it still typechecks end to end
// and that the external endpoints kept their types.
PreservationResult assert_preservation(const Configuration& before, const Configuration& after);

} // namespace ssl
