#include "ssl/cli.hpp"

#include <CLI11.hpp>
#include <fmt/core.h>
#include <json.hpp>
#include <unistd.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "ssl/guard.hpp"
#include "ssl/parser.hpp"
#include "ssl/printer.hpp"
#include "ssl/runtime.hpp"
#include "ssl/typecheck.hpp"
#include "ssl/validity.hpp"
#include "ssl/visibility.hpp"

namespace ssl {

namespace {

using nlohmann::json;

constexpr int kSchemaVersion = 1;

struct Ctx {
    std::ostream& out;
    std::ostream& err;
    bool color = false;
    std::string file;
};

bool want_color(const std::ostream& err) {
    const char* v = std::getenv("SSL_COLOR");
    std::string mode = v ? v : "auto";
    if (mode == "always")
        return true;
    if (mode == "never")
        return false;
    return &err == &std::cerr && isatty(2) != 0;
}

void print_diags(Ctx& c, const Diags& diags) {
    const char* tag = c.color ? "\x1b[31merror:\x1b[0m" : "error:";
    for (const auto& d : diags)
        c.err << fmt::format("{}:{}:{}: {} {}\n", c.file, d.span.line, d.span.col, tag,
                             d.message);
}

json diags_json(const Diags& diags) {
    json arr = json::array();
    for (const auto& d : diags)
        arr.push_back({{"line", d.span.line}, {"col", d.span.col}, {"message", d.message}});
    return arr;
}

std::optional<std::string> read_file(Ctx& c, const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        c.err << fmt::format("error: cannot read '{}'\n", path);
        return std::nullopt;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return std::move(buf).str();
}

struct FrontEnd {
    std::optional<Program> program; // set iff errors is empty
    Diags errors;
};

FrontEnd load_checked(const std::string& source) {
    ParseResult parsed = parse_program(source);
    if (!parsed.program)
        return {std::nullopt, std::move(parsed.errors)};
    Diags errs = check_program(*parsed.program);
    if (!errs.empty())
        return {std::nullopt, std::move(errs)};
    return {std::move(parsed.program), {}};
}

// Emits the failure report for a file that did not make it through parsing
// and typechecking, in the requested format, and returns exit code 1.
int report_front_end_failure(Ctx& c, const char* command, const Diags& errs, bool json_mode) {
    if (json_mode) {
        json j{{"schema_version", kSchemaVersion},
               {"command", command},
               {"ok", false},
               {"diagnostics", diags_json(errs)}};
        c.out << j.dump() << "\n";
    } else {
        print_diags(c, errs);
    }
    return 1;
}

// Trace rendering -----------------------------------------------------------

std::string head_label(const Proc& p) {
    switch (p.kind) {
        case ProcKind::SendLabelRight: return fmt::format("R.{}", p.label);
        case ProcKind::SendLabelLeft: return fmt::format("L.{}", p.label);
        case ProcKind::SendMuRight: return fmt::format("R.mu_{}", p.type_var);
        case ProcKind::SendNuLeft: return fmt::format("L.nu_{}", p.type_var);
        case ProcKind::CaseMuLeft: return fmt::format("caseL(mu_{})", p.type_var);
        case ProcKind::CaseNuRight: return fmt::format("caseR(nu_{})", p.type_var);
        case ProcKind::CaseLeft: return "caseL";
        case ProcKind::CaseRight: return "caseR";
        case ProcKind::CloseRight: return "closeR";
        case ProcKind::WaitLeft: return "waitL";
        case ProcKind::Forward: return "fwd";
        case ProcKind::Cut: return fmt::format("cut {}", p.cut_channel);
        case ProcKind::Call: return fmt::format("call {}", p.callee);
    }
    return "";
}

std::string render_state(const std::optional<GenChannel>& left, const GenChannel& right) {
    std::string l = left ? fmt::format("{}^{}", left->base, left->gen) : std::string(".");
    return fmt::format("{} |- {}^{}", l, right.base, right.gen);
}

class SymbolicTrace : public ValidityObserver {
public:
    explicit SymbolicTrace(std::ostream& out) : out_(out) {}

    void on_def(const ProcDef& def) override {
        out_ << fmt::format("== {}\n", def.name);
        marks_.clear();
        mark_ = 0;
        indent_ = 1;
    }
    void on_step(const Proc& p, const std::optional<GenChannel>& left, const GenChannel& right,
                 const Omega& om) override {
        out_ << fmt::format("{:{}}{:<16} {}\n", "", indent_ * 2, head_label(p),
                            render_state(left, right));
        const auto& log = om.log();
        for (size_t i = mark_; i < log.size(); ++i)
            out_ << fmt::format("{:{}}  + {} {} {}\n", "", indent_ * 2, to_string(log[i].a),
                                log[i].strict ? "<" : "=", to_string(log[i].b));
        mark_ = log.size();
    }
    void on_push() override {
        marks_.push_back(mark_);
        indent_ += 1;
    }
    void on_pop() override {
        mark_ = marks_.back();
        marks_.pop_back();
        indent_ -= 1;
    }
    void on_branch(const Proc&, const std::string& label) override {
        out_ << fmt::format("{:{}}[{}]\n", "", indent_ * 2, label);
    }
    void on_cut_half(const Proc&, bool head) override {
        out_ << fmt::format("{:{}}[{}]\n", "", indent_ * 2, head ? "head" : "tail");
    }
    void on_call(const Proc&, const CombinedResult& res, const CallChannels&,
                 const CallChannels&) override {
        out_ << fmt::format("{:{}}  -> clause {}: {}\n", "", indent_ * 2, res.clause,
                            res.ok ? "ok" : "FAIL");
    }

private:
    std::ostream& out_;
    std::vector<size_t> marks_;
    size_t mark_ = 0;
    int indent_ = 1;
};

// The counter annotation view: every priority slot carries the net number
// of unfoldings relative to the definition's entry, with received
// unfoldings counting down and sent ones counting up; a slot a cut mints
// fresh at a priority its type can still unfold shows as inf.
class NumericTrace : public ValidityObserver {
public:
    NumericTrace(const Program& prog, std::ostream& out)
        : prog_(prog), out_(out), prios_(prog.sig.priorities()) {}

    void on_def(const ProcDef& def) override {
        frame_ = Frame{};
        frame_.has_left = def.left.has_value();
        if (frame_.has_left)
            frame_.left.assign(prios_.size(), 0);
        frame_.right.assign(prios_.size(), 0);
        stack_.clear();
        indent_ = 1;
        out_ << fmt::format("== {}\n", def.name);
    }
    void on_step(const Proc& p, const std::optional<GenChannel>&, const GenChannel&,
                 const Omega&) override {
        apply(p);
        out_ << fmt::format("{:{}}{:<16} {}\n", "", indent_ * 2, head_label(p), state());
    }
    void on_push() override {
        stack_.push_back(frame_);
        indent_ += 1;
    }
    void on_pop() override {
        frame_ = stack_.back();
        stack_.pop_back();
        indent_ -= 1;
    }
    void on_branch(const Proc&, const std::string& label) override {
        out_ << fmt::format("{:{}}[{}]\n", "", indent_ * 2, label);
    }
    void on_cut_half(const Proc& cut, bool head) override {
        std::set<int> visible = visible_priorities(prog_.sig, cut.cut_type);
        Frame next;
        if (head) {
            next.has_left = frame_.has_left;
            next.left = frame_.left;
            for (size_t i = 0; i < prios_.size(); ++i)
                next.right.push_back(visible.count(prios_[i]) ? Slot{} : frame_.right[i]);
        } else {
            next.has_left = true;
            for (size_t i = 0; i < prios_.size(); ++i)
                next.left.push_back(frame_.has_left && !visible.count(prios_[i])
                                        ? frame_.left[i]
                                        : Slot{});
            next.right = frame_.right;
        }
        frame_ = std::move(next);
        out_ << fmt::format("{:{}}[{}]\n", "", indent_ * 2, head ? "head" : "tail");
    }
    void on_call(const Proc&, const CombinedResult& res, const CallChannels&,
                 const CallChannels&) override {
        out_ << fmt::format("{:{}}  -> clause {}: {}\n", "", indent_ * 2, res.clause,
                            res.ok ? "ok" : "FAIL");
    }

private:
    using Slot = std::optional<int>; // nullopt: fresh at a visible priority

    struct Frame {
        bool has_left = false;
        std::vector<Slot> left, right;
    };

    const Program& prog_;
    std::ostream& out_;
    std::vector<int> prios_;
    Frame frame_;
    std::vector<Frame> stack_;
    int indent_ = 1;

    void bump(std::vector<Slot>& slots, int priority, int delta) {
        for (size_t i = 0; i < prios_.size(); ++i)
            if (prios_[i] == priority && slots[i])
                *slots[i] += delta;
    }

    void apply(const Proc& p) {
        switch (p.kind) {
            case ProcKind::CaseMuLeft:
                bump(frame_.left, priority_of(prog_.sig, p.type_var), -1);
                break;
            case ProcKind::SendNuLeft:
                bump(frame_.left, priority_of(prog_.sig, p.type_var), +1);
                break;
            case ProcKind::SendMuRight:
                bump(frame_.right, priority_of(prog_.sig, p.type_var), +1);
                break;
            case ProcKind::CaseNuRight:
                bump(frame_.right, priority_of(prog_.sig, p.type_var), -1);
                break;
            case ProcKind::WaitLeft:
                frame_.has_left = false;
                frame_.left.clear();
                break;
            default:
                break;
        }
    }

    std::string state() const {
        auto render = [](const std::vector<Slot>& slots) {
            std::string s = "[";
            for (size_t i = 0; i < slots.size(); ++i) {
                if (i)
                    s += ", ";
                s += slots[i] ? fmt::format("{}", *slots[i]) : std::string("inf");
            }
            return s + "]";
        };
        std::string l = frame_.has_left ? render(frame_.left) : std::string("-");
        return fmt::format("left {} right {}", l, render(frame_.right));
    }
};

class FanoutObserver : public ValidityObserver {
public:
    void add(ValidityObserver* obs) { subs_.push_back(obs); }

    void on_def(const ProcDef& d) override {
        for (auto* s : subs_)
            s->on_def(d);
    }
    void on_step(const Proc& p, const std::optional<GenChannel>& l, const GenChannel& r,
                 const Omega& om) override {
        for (auto* s : subs_)
            s->on_step(p, l, r, om);
    }
    void on_push() override {
        for (auto* s : subs_)
            s->on_push();
    }
    void on_pop() override {
        for (auto* s : subs_)
            s->on_pop();
    }
    void on_branch(const Proc& p, const std::string& label) override {
        for (auto* s : subs_)
            s->on_branch(p, label);
    }
    void on_cut_half(const Proc& p, bool head) override {
        for (auto* s : subs_)
            s->on_cut_half(p, head);
    }
    void on_call(const Proc& p, const CombinedResult& res, const CallChannels& site,
                 const CallChannels& root) override {
        for (auto* s : subs_)
            s->on_call(p, res, site, root);
    }

private:
    std::vector<ValidityObserver*> subs_;
};

// Subcommands ---------------------------------------------------------------

int cmd_check(Ctx& c, const std::string& path, bool json_mode) {
    auto source = read_file(c, path);
    if (!source)
        return 2;
    FrontEnd fe = load_checked(*source);
    if (json_mode) {
        json j{{"schema_version", kSchemaVersion},
               {"command", "check"},
               {"ok", fe.program.has_value()},
               {"diagnostics", diags_json(fe.errors)}};
        c.out << j.dump() << "\n";
    } else if (fe.program) {
        c.out << "ok\n";
    } else {
        print_diags(c, fe.errors);
    }
    return fe.program ? 0 : 1;
}

int cmd_validate(Ctx& c, const std::string& path, bool json_mode, bool trace, bool numeric) {
    auto source = read_file(c, path);
    if (!source)
        return 2;
    FrontEnd fe = load_checked(*source);
    if (!fe.program)
        return report_front_end_failure(c, "validate", fe.errors, json_mode);

    FanoutObserver fan;
    std::optional<SymbolicTrace> sym;
    std::optional<NumericTrace> num;
    if (trace)
        fan.add(&sym.emplace(c.out));
    if (numeric)
        fan.add(&num.emplace(*fe.program, c.out));

    ValidityReport report =
        check_validity(*fe.program, 0, trace || numeric ? &fan : nullptr);

    if (json_mode) {
        json defs = json::array();
        for (const auto& d : report.defs) {
            json fails = json::array();
            for (const auto& f : d.failing)
                fails.push_back({{"callee", f.callee},
                                 {"line", f.span.line},
                                 {"col", f.span.col},
                                 {"clause", f.clause},
                                 {"reason", f.reason}});
            defs.push_back({{"name", d.name},
                            {"verdict", d.valid ? "valid" : "invalid"},
                            {"failing_calls", std::move(fails)}});
        }
        json j{{"schema_version", kSchemaVersion},
               {"command", "validate"},
               {"verdict", report.all_valid() ? "valid" : "invalid"},
               {"defs", std::move(defs)}};
        c.out << j.dump() << "\n";
    } else {
        for (const auto& d : report.defs) {
            c.out << fmt::format("{}: {}\n", d.name, d.valid ? "valid" : "invalid");
            for (const auto& f : d.failing)
                c.out << fmt::format("  {}:{}:{}: call '{}' fails clause {}: {}\n", c.file,
                                     f.span.line, f.span.col, f.callee, f.clause, f.reason);
        }
        c.out << (report.all_valid() ? "valid\n" : "invalid\n");
    }
    return report.all_valid() ? 0 : 1;
}

int cmd_run(Ctx& c, const std::string& path, int fuel, bool json_mode, bool trace) {
    auto source = read_file(c, path);
    if (!source)
        return 2;
    FrontEnd fe = load_checked(*source);
    if (!fe.program)
        return report_front_end_failure(c, "run", fe.errors, json_mode);
    if (!fe.program->main_name) {
        if (json_mode) {
            json j{{"schema_version", kSchemaVersion},
                   {"command", "run"},
                   {"ok", false},
                   {"diagnostics",
                    json::array({{{"line", 0}, {"col", 0},
                                  {"message", "program has no 'main' process"}}})}};
            c.out << j.dump() << "\n";
        } else {
            c.err << fmt::format("{}: error: program has no 'main' process\n", c.file);
        }
        return 1;
    }

    RunOutcome outcome = run(load(*fe.program), fuel);

    const char* status = "";
    switch (outcome.status) {
        case RunStatus::EmptyConfig: status = "empty"; break;
        case RunStatus::ExternalPoised: status = "external-poised"; break;
        case RunStatus::FuelExhausted: status = "fuel-exhausted"; break;
        case RunStatus::StuckError: status = "stuck"; break;
    }
    bool pass = outcome.status == RunStatus::EmptyConfig ||
                outcome.status == RunStatus::ExternalPoised;

    if (json_mode) {
        json j{{"schema_version", kSchemaVersion},
               {"command", "run"},
               {"outcome", status},
               {"side", outcome.side},
               {"action", outcome.action},
               {"steps", outcome.steps}};
        if (trace) {
            json steps = json::array();
            for (const auto& t : outcome.trace)
                steps.push_back({{"index", t.index},
                                 {"rule", t.rule},
                                 {"junction", t.junction},
                                 {"payload", t.payload}});
            j["trace"] = std::move(steps);
        }
        c.out << j.dump() << "\n";
    } else {
        if (trace)
            for (const auto& t : outcome.trace)
                c.out << fmt::format("{:>5}  {:<8} {:<12} {}\n", t.index, t.rule, t.junction,
                                     t.payload);
        switch (outcome.status) {
            case RunStatus::EmptyConfig:
                c.out << fmt::format("empty configuration after {} steps\n", outcome.steps);
                break;
            case RunStatus::ExternalPoised:
                c.out << fmt::format("poised on the {} endpoint ({}) after {} steps\n",
                                     outcome.side, outcome.action, outcome.steps);
                break;
            case RunStatus::FuelExhausted:
                c.out << fmt::format("fuel exhausted after {} steps\n", outcome.steps);
                break;
            case RunStatus::StuckError:
                c.out << fmt::format("stuck after {} steps: {}\n", outcome.steps,
                                     outcome.action);
                break;
        }
    }
    return pass ? 0 : 1;
}

int cmd_oracle(Ctx& c, const std::string& path, int depth, bool json_mode) {
    auto source = read_file(c, path);
    if (!source)
        return 2;
    FrontEnd fe = load_checked(*source);
    if (!fe.program)
        return report_front_end_failure(c, "oracle", fe.errors, json_mode);

    GuardReport report = check_guard(*fe.program, depth);

    if (json_mode) {
        json defs = json::array();
        for (const auto& d : report.defs) {
            json cycles = json::array();
            for (const auto& cy : d.cycles)
                cycles.push_back({{"callee", cy.callee},
                                  {"start", {{"left", cy.start_left}, {"right", cy.start_right}}},
                                  {"end", {{"left", cy.end_left}, {"right", cy.end_right}}},
                                  {"length", cy.length},
                                  {"classification", to_string(cy.cls)}});
            defs.push_back(
                {{"name", d.name}, {"guarded", d.guarded}, {"cycles", std::move(cycles)}});
        }
        json j{{"schema_version", kSchemaVersion},
               {"command", "oracle"},
               {"depth", report.depth},
               {"verdict", report.all_guarded() ? "all-guarded" : "counterexample"},
               {"defs", std::move(defs)}};
        c.out << j.dump() << "\n";
    } else {
        for (const auto& d : report.defs) {
            c.out << fmt::format("{}: {} ({} cycles)\n", d.name,
                                 d.guarded ? "guarded" : "unguarded", d.cycles.size());
            for (const auto& cy : d.cycles)
                if (cy.cls == CycleClass::Neither)
                    c.out << fmt::format("  cycle to '{}' [{} |- {}] => [{} |- {}]: {}\n",
                                         cy.callee, cy.start_left, cy.start_right, cy.end_left,
                                         cy.end_right, to_string(cy.cls));
        }
        c.out << (report.all_guarded() ? "all-guarded\n" : "counterexample\n");
    }
    return report.all_guarded() ? 0 : 1;
}

int cmd_fmt(Ctx& c, const std::string& path) {
    auto source = read_file(c, path);
    if (!source)
        return 2;
    ParseResult parsed = parse_program(*source);
    if (!parsed.program) {
        print_diags(c, parsed.errors);
        return 1;
    }
    c.out << print_program(*parsed.program);
    return 0;
}

} // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    Ctx ctx{out, err, want_color(err), ""};

    CLI::App app{"checker and interpreter for a subsingleton session process language"};
    app.require_subcommand(1);

    std::string file;
    bool json_mode = false;
    bool trace = false;
    bool numeric = false;
    int fuel = 10000;
    int depth = 3;

    CLI::App* check = app.add_subcommand("check", "parse and typecheck a program");
    check->add_option("file", file, "source file")->required();
    check->add_flag("--json", json_mode, "machine-readable report");

    CLI::App* validate =
        app.add_subcommand("validate", "decide validity of every definition");
    validate->add_option("file", file, "source file")->required();
    validate->add_flag("--json", json_mode, "machine-readable report");
    validate->add_flag("--trace", trace, "print the traversal with store updates");
    validate->add_flag("--numeric-trace", numeric, "print the counter annotation view");

    CLI::App* runc = app.add_subcommand("run", "execute the program's main process");
    runc->add_option("file", file, "source file")->required();
    runc->add_option("--fuel", fuel, "step budget")->capture_default_str();
    runc->add_flag("--json", json_mode, "machine-readable report");
    runc->add_flag("--trace", trace, "print one line per step");

    CLI::App* oracle = app.add_subcommand("oracle", "bounded guard-condition cross-check");
    oracle->add_option("file", file, "source file")->required();
    oracle->add_option("--depth", depth, "expansion bound")->capture_default_str();
    oracle->add_flag("--json", json_mode, "machine-readable report");

    CLI::App* fmtc = app.add_subcommand("fmt", "reprint a program in canonical layout");
    fmtc->add_option("file", file, "source file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << fmt::format("error: {}\n", e.what());
        return 2;
    }

    ctx.file = file;
    if (check->parsed())
        return cmd_check(ctx, file, json_mode);
    if (validate->parsed())
        return cmd_validate(ctx, file, json_mode, trace, numeric);
    if (runc->parsed())
        return cmd_run(ctx, file, fuel, json_mode, trace);
    if (oracle->parsed())
        return cmd_oracle(ctx, file, depth, json_mode);
    if (fmtc->parsed())
        return cmd_fmt(ctx, file);
    return 2;
}

} // namespace ssl
