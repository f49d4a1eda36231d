#include <doctest.h>

#include "ssl/parser.hpp"
#include "ssl/printer.hpp"
#include "ssl/runtime.hpp"
#include "ssl/typecheck.hpp"

#include "corpus_util.hpp"

using namespace ssl;
using namespace ssltest;

namespace {

Program parse_checked(const std::string& src) {
    auto r = parse_program(src);
    REQUIRE_MESSAGE(r.errors.empty(),
                    (r.errors.empty() ? std::string() : r.errors.front().message));
    Diags d = check_program(*r.program);
    REQUIRE_MESSAGE(d.empty(), (d.empty() ? std::string() : d.front().message));
    return *r.program;
}

const char* kChain =
    "type nat =[1] mu +{ z : 1, s : nat }\n"
    "proc Num2 : . |- nat = R.mu_nat; R.s; R.mu_nat; R.s; R.mu_nat; R.z; closeR\n"
    "proc Copy : nat |- nat = caseL(mu_nat => caseL("
    " z => R.mu_nat; R.z; waitL; closeR | s => R.mu_nat; R.s; call Copy))\n"
    "proc Block : nat |- 1 = caseL(mu_nat => caseL("
    " z => waitL; closeR | s => call Block))\n"
    "order[1] Copy, Block\n";

Configuration chain_config() {
    Program p = parse_checked(kChain);
    auto left = compose(load_def(p, "Num2"), load_def(p, "Copy"));
    REQUIRE(left.errors.empty());
    auto all = compose(*left.config, load_def(p, "Block"));
    REQUIRE(all.errors.empty());
    return *all.config;
}

// Steps to quiescence by hand, asserting preservation across every step.
int step_with_preservation(Configuration c, int fuel) {
    int steps = 0;
    while (steps < fuel) {
        Configuration before = c;
        std::optional<StepInfo> info = step(c);
        if (!info)
            break;
        ++steps;
        PreservationResult pres = assert_preservation(before, c);
        CHECK_MESSAGE(pres.ok, pres.detail);
    }
    return steps;
}

} // namespace

TEST_CASE("runtime: a closed chain runs to the final close") {
    Configuration c = chain_config();
    CHECK_FALSE(c.ext_left.has_value());
    REQUIRE(c.ext_right.has_value());
    CHECK(print_type(c.ext_right->type) == "1");
    REQUIRE(c.procs.size() == 3);
    REQUIRE(c.junctions.size() == 2);
    CHECK(c.junctions[0].name == "c0");
    CHECK(c.junctions[1].name == "c1");

    RunOutcome out = run(c, 10000);
    CHECK(out.status == RunStatus::ExternalPoised);
    CHECK(out.side == "right");
    CHECK(out.action == "close");
    CHECK(out.steps == 21); // 6 per successor, 9 for the zero tail
    CHECK((int)out.trace.size() == out.steps);
}

TEST_CASE("runtime: preservation holds at every step of the chain") {
    CHECK(step_with_preservation(chain_config(), 10000) == 21);
}

TEST_CASE("runtime: compose rejects mismatched seams") {
    Program p = parse_checked(kChain);
    SUBCASE("junction types differ") {
        auto r = compose(load_def(p, "Block"), load_def(p, "Copy"));
        REQUIRE(r.errors.size() == 1);
        CHECK(r.errors[0].message == "type mismatch at the junction: 1 vs nat");
        CHECK_FALSE(r.config.has_value());
    }
    SUBCASE("right side has no left endpoint") {
        auto r = compose(load_def(p, "Copy"), load_def(p, "Num2"));
        REQUIRE(r.errors.size() == 1);
        CHECK(r.errors[0].message ==
              "type mismatch at the junction: the right configuration has no left endpoint");
    }
}

TEST_CASE("runtime: compose merges programs and rejects conflicts") {
    Program a = parse_checked("type nat =[1] mu +{ z : 1, s : nat }\n"
                              "proc Produce : . |- nat = R.mu_nat; R.z; closeR\n"
                              "proc Shared : . |- 1 = closeR\n");
    SUBCASE("conflicting type definitions") {
        Program b = parse_checked("type nat =[1] mu +{ z : 1 }\n"
                                  "proc Consume : nat |- 1 = caseL(mu_nat => caseL("
                                  "z => waitL; closeR))\n");
        auto r = compose(load_def(a, "Produce"), load_def(b, "Consume"));
        REQUIRE(r.errors.size() == 1);
        CHECK(r.errors[0].message == "type 'nat' differs between the configurations");
    }
    SUBCASE("conflicting process definitions") {
        Program b = parse_checked("type nat =[1] mu +{ z : 1, s : nat }\n"
                                  "proc Shared : . |- 1 = closeR\n"
                                  "proc Consume : nat |- 1 = caseL(mu_nat => caseL("
                                  " z => waitL; closeR | s => call Consume))\n");
        auto ok = compose(load_def(a, "Produce"), load_def(b, "Consume"));
        CHECK(ok.errors.empty()); // identical Shared merges fine

        Program b2 = parse_checked("type nat =[1] mu +{ z : 1, s : nat }\n"
                                   "proc Shared : . |- 1 = u : 1 <- (closeR) ; waitL; closeR\n"
                                   "proc Consume : nat |- 1 = caseL(mu_nat => caseL("
                                   " z => waitL; closeR | s => call Consume))\n");
        auto bad = compose(load_def(a, "Produce"), load_def(b2, "Consume"));
        REQUIRE(bad.errors.size() == 1);
        CHECK(bad.errors[0].message == "process 'Shared' differs between the configurations");
    }
}

TEST_CASE("runtime: the empty configuration is a unit") {
    Configuration empty;
    CHECK(empty.empty());
    RunOutcome out = run(empty, 100);
    CHECK(out.status == RunStatus::EmptyConfig);
    CHECK(out.steps == 0);

    Program p = parse_checked(kChain);
    Configuration c = load_def(p, "Num2");
    auto l = compose(empty, c);
    REQUIRE(l.errors.empty());
    CHECK(l.config->procs.size() == 1);
    auto r = compose(c, empty);
    REQUIRE(r.errors.empty());
    CHECK(r.config->procs.size() == 1);
}

TEST_CASE("runtime: fuel boundaries") {
    Program p = parse_checked(kChain);
    SUBCASE("no fuel with work pending") {
        RunOutcome out = run(chain_config(), 0);
        CHECK(out.status == RunStatus::FuelExhausted);
        CHECK(out.steps == 0);
    }
    SUBCASE("one unit of fuel") {
        RunOutcome out = run(chain_config(), 1);
        CHECK(out.status == RunStatus::FuelExhausted);
        CHECK(out.steps == 1);
        REQUIRE(out.trace.size() == 1);
        CHECK(out.trace[0].rule == "def");
    }
    SUBCASE("an already-poised process ignores fuel") {
        Configuration c = load_def(p, "Num2");
        // A single definition expands once, then sends on its external side.
        RunOutcome out = run(c, 10000);
        CHECK(out.status == RunStatus::ExternalPoised);
        CHECK(out.side == "right");
        CHECK(out.action == "send mu_nat");
        CHECK(out.steps == 1);
        // With zero fuel even the expansion is out of reach.
        RunOutcome none = run(load_def(p, "Num2"), 0);
        CHECK(none.status == RunStatus::FuelExhausted);
    }
}

TEST_CASE("runtime: divergent internal chatter exhausts fuel") {
    Program p = load_corpus("loop_block");
    RunOutcome out = run(load(p), 10000);
    CHECK(out.status == RunStatus::FuelExhausted);
    CHECK(out.steps == 10000);
    CHECK(out.trace.size() == 10000);

    RunOutcome shorter = run(load(p), 137);
    CHECK(shorter.status == RunStatus::FuelExhausted);
    CHECK(shorter.steps == 137);
}

TEST_CASE("runtime: recorded trace of the two-stage copy") {
    Program p = load_corpus("succcopy");
    RunOutcome out = run(load(p), 10000);
    CHECK(out.status == RunStatus::ExternalPoised);
    CHECK(out.side == "right");
    CHECK(out.action == "send mu_nat");
    REQUIRE(out.steps == 7);

    std::vector<std::vector<std::string>> want = {
        {"def", "r", "SuccCopy"}, {"spawn", "w#0", ""},   {"def", "w#0", "Succ"},
        {"def", "r", "Copy"},     {"mu_r", "w#0", "mu_nat"}, {"label_r", "w#0", "s"},
        {"fwd", "l", ""},
    };
    REQUIRE(out.trace.size() == want.size());
    for (size_t i = 0; i < want.size(); ++i) {
        CAPTURE(i);
        CHECK(out.trace[i].rule == want[i][0]);
        CHECK(out.trace[i].junction == want[i][1]);
        CHECK(out.trace[i].payload == want[i][2]);
        CHECK(out.trace[i].index == (int)i);
    }
}

TEST_CASE("runtime: stepping is deterministic") {
    for (const auto& name : corpus_names()) {
        CAPTURE(name);
        Program p = load_corpus(name);
        if (!p.main_name)
            continue;
        RunOutcome a = run(load(p), 2000);
        RunOutcome b = run(load(p), 2000);
        CHECK(a.status == b.status);
        CHECK(a.steps == b.steps);
        REQUIRE(a.trace.size() == b.trace.size());
        for (size_t i = 0; i < a.trace.size(); ++i) {
            CHECK(a.trace[i].rule == b.trace[i].rule);
            CHECK(a.trace[i].junction == b.trace[i].junction);
            CHECK(a.trace[i].payload == b.trace[i].payload);
        }
    }
}

TEST_CASE("runtime: corpus outcomes match the recorded table") {
    for (const auto& name : corpus_names()) {
        CAPTURE(name);
        Program p = load_corpus(name);
        Expected exp = load_expected(name);
        REQUIRE(p.main_name.has_value());
        RunOutcome out = run(load(p), 10000);
        CHECK(out.status != RunStatus::StuckError);
        std::string status = out.status == RunStatus::ExternalPoised ? "external-poised"
                             : out.status == RunStatus::FuelExhausted ? "fuel-exhausted"
                             : out.status == RunStatus::EmptyConfig   ? "empty"
                                                                      : "stuck";
        CHECK(status == exp.run_outcome);
        if (!exp.run_side.empty())
            CHECK(out.side == exp.run_side);
        if (!exp.run_action.empty())
            CHECK(out.action == exp.run_action);
    }
}

TEST_CASE("runtime: preservation across every corpus trace") {
    int total = 0;
    for (const auto& name : corpus_names()) {
        CAPTURE(name);
        Program p = load_corpus(name);
        if (!p.main_name)
            continue;
        total += step_with_preservation(load(p), 1500);
    }
    CHECK(total >= 1500); // the divergent fixture alone hits its cap
}

TEST_CASE("runtime: preservation checker catches corruption") {
    Program p = parse_checked(kChain);
    Configuration before = chain_config();

    SUBCASE("a rewritten process no longer typechecks") {
        Configuration after = before;
        step(after);
        auto bogus = std::make_shared<Proc>();
        bogus->kind = ProcKind::CloseRight;
        after.procs[0].code = bogus; // right side of this slot is nat, not 1
        PreservationResult res = assert_preservation(before, after);
        CHECK_FALSE(res.ok);
        CHECK(res.detail.rfind("configuration no longer typechecks:", 0) == 0);
    }
    SUBCASE("external endpoints must keep their types") {
        Configuration other = load_def(p, "Copy"); // nat |- nat, typechecks alone
        PreservationResult res = assert_preservation(before, other);
        CHECK_FALSE(res.ok);
        CHECK(res.detail == "external endpoint types changed across the step");
    }
}

TEST_CASE("runtime: configuration typecheck is clean along a run") {
    Configuration c = chain_config();
    CHECK(typecheck_configuration(c).empty());
    for (int i = 0; i < 5; ++i) {
        REQUIRE(step(c).has_value());
        CHECK(typecheck_configuration(c).empty());
    }
}
