// Release gates. Each gate prints exactly one PASS/FAIL line; the process
// exits with the number of failed gates. Budgets and expected values are
// pinned here so a regression shows up as a red line, not a silent drift.

#include <chrono>
#include <cstdio>
#include <exception>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "ssl/guard.hpp"
#include "ssl/order.hpp"
#include "ssl/parser.hpp"
#include "ssl/printer.hpp"
#include "ssl/runtime.hpp"
#include "ssl/typecheck.hpp"
#include "ssl/validity.hpp"
#include "ssl/visibility.hpp"

#include "corpus_util.hpp"
#include "gen.hpp"

using namespace ssl;
using namespace ssltest;

namespace {

constexpr int kFuel = 10000;
constexpr double kVerdictBudgetMs = 1000.0;
constexpr int kMinPreservedSteps = 10000;
constexpr int kMaxRung = 16;
constexpr double kDoublingLimit = 3.0;
constexpr double kSuiteBudgetMs = 30000.0;
constexpr int kRoundTrips = 100;

// Step counts for the staircase harness, frozen from the first
// instrumented run; the closed form 6k+9 must agree with every entry.
constexpr int kStaircaseSteps[kMaxRung + 1] = {9,  15, 21, 27, 33, 39, 45, 51, 57,
                                               63, 69, 75, 81, 87, 93, 99, 105};

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

struct Gate {
    std::string name;
    int checks = 0;
    int failures = 0;
    std::string first_failure;

    Gate() = default;
    explicit Gate(std::string n) : name(std::move(n)) {}

    void expect(bool ok, const std::string& what) {
        ++checks;
        if (!ok && failures++ == 0)
            first_failure = what;
    }
};

Program load_source(const std::string& src) {
    auto parsed = parse_program(src);
    if (!parsed.program)
        throw std::runtime_error("parse failed: " + parsed.errors.front().message);
    auto errs = check_program(*parsed.program);
    if (!errs.empty())
        throw std::runtime_error("typecheck failed: " + errs.front().message);
    return *parsed.program;
}

std::string staircase_source(int k) {
    std::string num = "proc Num : . |- nat = ";
    for (int i = 0; i < k; ++i)
        num += "R.mu_nat; R.s; ";
    num += "R.mu_nat; R.z; closeR\n";
    return "type nat =[1] mu +{ z : 1, s : nat }\n" + num +
           "proc Copy : nat |- nat =\n"
           "    caseL(mu_nat =>\n"
           "        caseL(z => R.mu_nat; R.z; waitL; closeR\n"
           "            | s => R.mu_nat; R.s; call Copy))\n"
           "proc Block : nat |- 1 =\n"
           "    caseL(mu_nat => caseL(z => waitL; closeR | s => call Block))\n"
           "main Num\n";
}

Configuration staircase_config(const Program& prog) {
    auto ab = compose(load_def(prog, "Num"), load_def(prog, "Copy"));
    auto abc = compose(*ab.config, load_def(prog, "Block"));
    return *abc.config;
}

std::string relay_chain_source(int n) {
    std::string src = "type nat =[1] mu +{ z : 1, s : nat }\n";
    for (int i = 0; i < n; ++i)
        src += fmt::format("proc C{} : nat |- nat =\n"
                           "    caseL(mu_nat =>\n"
                           "        caseL(z => R.mu_nat; R.z; waitL; closeR\n"
                           "            | s => R.mu_nat; R.s; call C{}))\n",
                           i, (i + 1) % n);
    src += "order[1] C0";
    for (int i = 1; i < n; ++i)
        src += fmt::format(" ~ C{}", i);
    return src + "\nmain C0\n";
}

// Gate 1: every fixture verdict matches its recorded expectation, the
// ping-pong loop stays invalid under every admissible priority
// reassignment, and the declared process-order facts hold.
Gate gate_corpus_verdicts() {
    Gate g{"corpus-verdicts"};
    auto start = Clock::now();

    for (const auto& name : corpus_names()) {
        Program prog = load_corpus(name);
        Expected exp = load_expected(name);
        g.expect(exp.typecheck_ok, name + ": fixture expected to typecheck");
        ValidityReport rep = check_validity(prog);
        g.expect(rep.all_valid() == exp.validity_valid, name + ": overall verdict mismatch");
        for (const auto& d : rep.defs) {
            auto it = exp.def_valid.find(d.name);
            g.expect(it != exp.def_valid.end(), name + ": no recorded verdict for " + d.name);
            if (it != exp.def_valid.end())
                g.expect(d.valid == it->second, name + ": verdict mismatch for " + d.name);
        }
    }

    // No priority assignment over the three type names rescues the loop.
    Program pingpong = load_corpus("pingpong");
    g.expect(pingpong.sig.entries.size() == 3, "pingpong signature must have 3 types");
    int admissible = 0;
    for (int pa = 1; pa <= 3; ++pa)
        for (int ps = 1; ps <= 3; ++ps)
            for (int pn = 1; pn <= 3; ++pn) {
                Program prog = pingpong;
                for (auto& e : prog.sig.entries)
                    e.priority = e.name == "ack" ? pa : e.name == "astream" ? ps : pn;
                if (!check_program(prog).empty())
                    continue;
                ++admissible;
                g.expect(!check_validity(prog).all_valid(),
                         fmt::format("pingpong valid under ({},{},{})", pa, ps, pn));
            }
    g.expect(admissible == 12, fmt::format("expected 12 admissible assignments, saw {}",
                                           admissible));

    // The declared process orders carry the verdicts they were written for.
    {
        Program prog = load_corpus("producer_idle");
        auto built = ProcOrder::build(prog);
        g.expect(built.errors.empty(), "producer_idle order build failed");
        g.expect(built.order.family_of("Idle") == 2, "Idle must sit in family 2");
        g.expect(built.order.rel("Idle", "Producer") == ProcOrder::Rel::Subset,
                 "Idle must be strictly below Producer");
    }
    {
        Program prog = load_corpus("bitcount");
        auto built = ProcOrder::build(prog);
        g.expect(built.errors.empty(), "bitcount order build failed");
        const char* names[] = {"BinSucc", "Counter", "NumBits", "BitCount"};
        for (const char* n : names)
            g.expect(built.order.family_of(n) == 0,
                     fmt::format("{} must sit in family 0", n));
        const std::pair<const char*, const char*> below[] = {
            {"BinSucc", "Counter"}, {"Counter", "BitCount"}, {"BinSucc", "NumBits"},
            {"NumBits", "BitCount"}, {"BinSucc", "BitCount"},
        };
        for (auto [a, b] : below)
            g.expect(built.order.rel(a, b) == ProcOrder::Rel::Subset,
                     fmt::format("{} must be strictly below {}", a, b));
    }

    // The empty counter fails at exactly one call: its own repetition.
    {
        ValidityReport rep = check_validity(load_corpus("empty_counter"));
        int failing = 0;
        for (const auto& d : rep.defs)
            for (const auto& f : d.failing) {
                ++failing;
                g.expect(d.name == "Empty" && f.callee == "Empty",
                         fmt::format("unexpected failing call {} -> {}", d.name, f.callee));
            }
        g.expect(failing == 1, fmt::format("expected exactly 1 failing call, saw {}", failing));
    }

    double ms = ms_since(start);
    g.expect(ms < kVerdictBudgetMs,
             fmt::format("verdict suite took {:.1f}ms (budget {:.0f}ms)", ms, kVerdictBudgetMs));
    g.name += fmt::format(" ({:.1f}ms)", ms);
    return g;
}

// Gate 2: reachable-priority sets of the counter signature.
Gate gate_visibility() {
    Gate g{"visibility"};
    Program prog = load_corpus("bitcount");
    g.expect(visible_priorities(prog.sig, mk_var("bin")) == std::set<int>{2},
             "bin must reach exactly priority 2");
    g.expect(visible_priorities(prog.sig, mk_var("ctr")) == std::set<int>{1, 2},
             "ctr must reach exactly priorities 1 and 2");
    return g;
}

// Gate 3: the channel list of the three-priority signature and all four
// of its prefixes, rendered verbatim.
Gate gate_channel_lists() {
    Gate g{"channel-lists"};
    Program prog = load_source("type ack =[1] mu +{ ack : astream }\n"
                               "type astream =[2] nu &{ head : ack, tail : astream }\n"
                               "type nat =[3] mu +{ z : 1, s : nat }\n"
                               "proc Spot : astream |- nat = call Spot\n");
    ChannelList l = build_list(prog.sig, GenChannel{"x", 0}, GenChannel{"y", 0});
    auto is = [&g](const std::string& got, const std::string& want) {
        g.expect(got == want, fmt::format("rendered {} instead of {}", got, want));
    };
    is(to_string(flatten(l)), "[x^0_1, y^0_1, y^0_2, x^0_2, x^0_3, y^0_3]");
    is(to_string(flatten_prefix(l, 0)), "[]");
    is(to_string(flatten_prefix(l, 1)), "[x^0_1]");
    is(to_string(flatten_prefix(l, 2)), "[x^0_1, y^0_1, y^0_2]");
    is(to_string(flatten_prefix(l, 3)), "[x^0_1, y^0_1, y^0_2, x^0_2, x^0_3]");
    return g;
}

// Gate 4: typing is preserved across every step of every fixture run.
Gate gate_preservation() {
    Gate g{"preservation"};
    int total = 0;
    for (const auto& name : corpus_names()) {
        Program prog = load_corpus(name);
        Configuration c = load(prog);
        for (int i = 0; i < kFuel; ++i) {
            Configuration before = c;
            std::optional<StepInfo> info = step(c);
            if (!info)
                break;
            ++total;
            PreservationResult pres = assert_preservation(before, c);
            g.expect(pres.ok, fmt::format("{} step {}: {}", name, i, pres.detail));
        }
    }
    g.expect(total >= kMinPreservedSteps,
             fmt::format("only {} steps recorded (need {})", total, kMinPreservedSteps));
    g.name += fmt::format(" ({} steps)", total);
    return g;
}

// Gate 5: no fixture run ever reports a stuck configuration.
Gate gate_progress() {
    Gate g{"progress"};
    for (const auto& name : corpus_names()) {
        RunOutcome out = run(load(load_corpus(name)), kFuel);
        g.expect(out.status != RunStatus::StuckError,
                 fmt::format("{} stuck after {} steps: {}", name, out.steps, out.action));
    }
    return g;
}

// Gate 6: the staircase harness terminates at the frozen step counts,
// which grow by a fixed increment, while the loop harness spins its whole
// fuel without an external action.
Gate gate_strong_progress() {
    Gate g{"strong-progress"};
    for (int k = 0; k <= kMaxRung; ++k) {
        g.expect(kStaircaseSteps[k] == 6 * k + 9,
                 fmt::format("frozen count at rung {} drifted from the closed form", k));
        Program prog = load_source(staircase_source(k));
        RunOutcome out = run(staircase_config(prog), kFuel);
        bool done = out.status == RunStatus::ExternalPoised ||
                    out.status == RunStatus::EmptyConfig;
        g.expect(done, fmt::format("rung {} did not finish within fuel", k));
        g.expect(out.steps == kStaircaseSteps[k],
                 fmt::format("rung {} took {} steps, frozen count is {}", k, out.steps,
                             kStaircaseSteps[k]));
    }

    RunOutcome spin = run(load(load_corpus("loop_block")), kFuel);
    g.expect(spin.status == RunStatus::FuelExhausted,
             "loop harness must exhaust its fuel");
    g.expect(spin.steps == kFuel,
             fmt::format("loop harness stopped at {} of {} steps", spin.steps, kFuel));
    return g;
}

// Gate 7: validity implies guardedness at every probed depth, and the two
// invalid loops surface an unguarded cycle by depth 2.
Gate gate_guard_implication() {
    Gate g{"guard-implication"};
    for (const auto& name : corpus_names()) {
        Program prog = load_corpus(name);
        if (!check_validity(prog).all_valid())
            continue;
        for (int depth = 1; depth <= 4; ++depth)
            g.expect(check_guard(prog, depth).all_guarded(),
                     fmt::format("{} valid but unguarded at depth {}", name, depth));
    }

    auto has_neither = [&g](const std::string& name, const std::string& def_name) {
        GuardReport rep = check_guard(load_corpus(name), 2);
        g.expect(!rep.all_guarded(), name + " must produce a counterexample at depth 2");
        bool found = false;
        for (const auto& d : rep.defs)
            if (d.name == def_name && !d.guarded)
                for (const auto& cy : d.cycles)
                    found |= cy.cls == CycleClass::Neither;
        g.expect(found, fmt::format("{}: no cycle of {} classified neither", name, def_name));
    };
    has_neither("boguscopy", "BogusCopy");
    has_neither("pingpong", "Ping");
    return g;
}

// Gate 8: validity checking scales roughly linearly on generated relay
// chains: wall time may at most triple per doubling of the program.
Gate gate_complexity() {
    Gate g{"complexity"};
    auto start = Clock::now();
    const int sizes[] = {50, 100, 200, 400};
    std::vector<double> mean_ms;
    std::string timing;
    for (int n : sizes) {
        std::string src = relay_chain_source(n);
        auto t0 = Clock::now();
        int iters = 0;
        do {
            Program prog = load_source(src);
            ValidityReport rep = check_validity(prog);
            g.expect(rep.all_valid(), fmt::format("chain of {} must be valid", n));
            ++iters;
        } while (ms_since(t0) < 50.0);
        mean_ms.push_back(ms_since(t0) / iters);
        timing += fmt::format("{}{}:{:.2f}ms", timing.empty() ? "" : " ", n, mean_ms.back());
    }
    for (size_t i = 1; i < mean_ms.size(); ++i) {
        double ratio = mean_ms[i] / mean_ms[i - 1];
        g.expect(ratio < kDoublingLimit,
                 fmt::format("{}x -> {}x grew {:.2f}x (limit {:.1f}x)", sizes[i - 1],
                             sizes[i], ratio, kDoublingLimit));
    }
    double ms = ms_since(start);
    g.expect(ms < kSuiteBudgetMs,
             fmt::format("smoke took {:.0f}ms (budget {:.0f}ms)", ms, kSuiteBudgetMs));
    g.name += fmt::format(" ({})", timing);
    return g;
}

// Gate 9: the printer round-trips random programs, the order store keeps
// its defensive checks on, and verdicts ignore the starting generation.
Gate gate_property_suites() {
    Gate g{"property-suites"};

    ProgramGen gen(20260822);
    for (int i = 0; i < kRoundTrips; ++i) {
        Program prog = gen.next();
        std::string printed = print_program(prog);
        auto parsed = parse_program(printed);
        bool ok = parsed.errors.empty() && parsed.program &&
                  program_identical(prog, *parsed.program) &&
                  print_program(*parsed.program) == printed;
        g.expect(ok, fmt::format("round-trip {} diverged", i));
        if (!ok)
            break;
    }

    {
        Omega om;
        om.add_lt(OrderVar{"a", 0, 1}, OrderVar{"b", 0, 1});
        size_t logged = om.log().size();
        bool threw = false;
        try {
            om.add_lt(OrderVar{"b", 0, 1}, OrderVar{"a", 0, 1});
        } catch (const std::logic_error&) {
            threw = true;
        }
        g.expect(threw, "order store accepted a cycle; defensive checks are off");
        om.add_eq(OrderVar{"c", 0, 1}, OrderVar{"a", 0, 1});
        g.expect(om.log().size() == logged + 1, "order log is not append-only");
        g.expect(om.entails_lt(OrderVar{"c", 0, 1}, OrderVar{"b", 0, 1}),
                 "entailment lost a relation after a merge");
    }

    for (const auto& name : corpus_names()) {
        Program prog = load_corpus(name);
        ValidityReport a = check_validity(prog, 0);
        ValidityReport b = check_validity(prog, 7);
        bool same = a.defs.size() == b.defs.size();
        for (size_t i = 0; same && i < a.defs.size(); ++i)
            same = a.defs[i].valid == b.defs[i].valid &&
                   a.defs[i].failing.size() == b.defs[i].failing.size();
        g.expect(same, name + ": verdict changed under a generation shift");
    }
    return g;
}

} // namespace

int main() {
    auto start = Clock::now();
    std::vector<Gate (*)()> gates = {
        gate_corpus_verdicts, gate_visibility,   gate_channel_lists,
        gate_preservation,    gate_progress,     gate_strong_progress,
        gate_guard_implication, gate_complexity, gate_property_suites,
    };

    int failed = 0;
    for (size_t i = 0; i < gates.size(); ++i) {
        Gate g;
        try {
            g = gates[i]();
        } catch (const std::exception& e) {
            g.name = "gate threw";
            g.expect(false, e.what());
        }
        bool pass = g.failures == 0;
        failed += pass ? 0 : 1;
        if (pass)
            std::printf("PASS %zu %s: %d checks\n", i + 1, g.name.c_str(), g.checks);
        else
            std::printf("FAIL %zu %s: %d of %d checks failed, first: %s\n", i + 1,
                        g.name.c_str(), g.failures, g.checks, g.first_failure.c_str());
    }

    double total = ms_since(start);
    bool in_budget = total < kSuiteBudgetMs;
    std::printf("%s: %d of %zu gates failed in %.0fms (budget %.0fms)\n",
                in_budget ? "DONE" : "OVER-BUDGET", failed, gates.size(), total,
                kSuiteBudgetMs);
    return failed + (in_budget ? 0 : 1);
}
