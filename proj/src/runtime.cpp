#include "ssl/runtime.hpp"

#include <fmt/core.h>

#include <cassert>

#include "ssl/printer.hpp"
#include "ssl/typecheck.hpp"

namespace ssl {

namespace {

std::string fresh_name(Configuration& c, const std::string& base) {
    std::string stem = base.substr(0, base.find('#'));
    return fmt::format("{}#{}", stem, c.name_counter++);
}

bool positive_type(const Signature& sig, const TypePtr& t) {
    switch (t->kind) {
        case TypeKind::Internal:
        case TypeKind::One:
            return true;
        case TypeKind::External:
            return false;
        case TypeKind::Var:
            return polarity_of(sig, t->var) == Polarity::Mu;
    }
    return true;
}

struct Redex {
    enum Kind { Spawn, Def, Fwd, Handshake } kind;
    size_t at; // process index; Handshake pairs at and at + 1
};

bool handshake_ready(const Configuration& c, size_t i) {
    const Proc& a = *c.procs[i].code;
    const Proc& b = *c.procs[i + 1].code;
    if (a.kind == ProcKind::SendLabelRight && b.kind == ProcKind::CaseLeft)
        return true;
    if (a.kind == ProcKind::SendMuRight && b.kind == ProcKind::CaseMuLeft)
        return true;
    if (a.kind == ProcKind::CloseRight && b.kind == ProcKind::WaitLeft)
        return true;
    if (a.kind == ProcKind::CaseRight && b.kind == ProcKind::SendLabelLeft)
        return true;
    if (a.kind == ProcKind::CaseNuRight && b.kind == ProcKind::SendNuLeft)
        return true;
    return false;
}

std::optional<Redex> find_redex(const Configuration& c) {
    for (size_t i = 0; i < c.procs.size(); ++i) {
        ProcKind k = c.procs[i].code->kind;
        if (k == ProcKind::Cut)
            return Redex{Redex::Spawn, i};
        if (k == ProcKind::Call)
            return Redex{Redex::Def, i};
        if (k == ProcKind::Forward && c.procs.size() > 1)
            return Redex{Redex::Fwd, i};
        if (i + 1 < c.procs.size() && handshake_ready(c, i))
            return Redex{Redex::Handshake, i};
    }
    return std::nullopt;
}

StepInfo apply_spawn(Configuration& c, size_t i) {
    ProcPtr cut = c.procs[i].code;
    Endpoint junction{fresh_name(c, cut->cut_channel), cut->cut_type};
    std::string name = junction.name;
    c.procs[i].code = cut->cut_head;
    c.procs.insert(c.procs.begin() + static_cast<long>(i) + 1, RunProc{cut->cut_tail});
    c.junctions.insert(c.junctions.begin() + static_cast<long>(i), std::move(junction));
    return {"spawn", name, ""};
}

StepInfo apply_def(Configuration& c, size_t i) {
    const Proc& call = *c.procs[i].code;
    const ProcDef* def = c.program.find_def(call.callee);
    assert(def);
    c.procs[i].code = def->body;
    std::string at = i + 1 < c.procs.size() ? c.junctions[i].name : c.ext_right->name;
    return {"def", at, call.callee};
}

StepInfo apply_fwd(Configuration& c, size_t i) {
    assert(c.procs.size() > 1);
    if (i == 0) {
        // Left boundary: the forwarder bridges the external left endpoint
        // to junction 0, so the neighbor inherits the external endpoint.
        assert(c.ext_left);
        assert(types_equal(c.ext_left->type, c.junctions[0].type));
        std::string name = c.ext_left->name;
        c.procs.erase(c.procs.begin());
        c.junctions.erase(c.junctions.begin());
        return {"fwd", name, ""};
    }
    if (i + 1 == c.procs.size()) {
        assert(c.ext_right);
        assert(types_equal(c.ext_right->type, c.junctions[i - 1].type));
        std::string name = c.ext_right->name;
        c.procs.pop_back();
        c.junctions.pop_back();
        return {"fwd", name, ""};
    }
    assert(types_equal(c.junctions[i - 1].type, c.junctions[i].type));
    Endpoint merged{fresh_name(c, c.junctions[i - 1].name), c.junctions[i - 1].type};
    std::string name = merged.name;
    c.junctions[i - 1] = std::move(merged);
    c.junctions.erase(c.junctions.begin() + static_cast<long>(i));
    c.procs.erase(c.procs.begin() + static_cast<long>(i));
    return {"fwd", name, ""};
}

StepInfo apply_handshake(Configuration& c, size_t i) {
    const Proc& a = *c.procs[i].code;
    const Proc& b = *c.procs[i + 1].code;
    Endpoint& junction = c.junctions[i];
    std::string at = junction.name;

    if (a.kind == ProcKind::SendLabelRight) {
        assert(junction.type->kind == TypeKind::Internal);
        const TypeBranch* ty = find_branch(*junction.type, a.label);
        const ProcBranch* target = nullptr;
        for (const auto& br : b.branches)
            if (br.label == a.label)
                target = &br;
        assert(ty && target);
        junction.type = ty->type;
        std::string label = a.label;
        c.procs[i].code = a.cont;
        c.procs[i + 1].code = target->body;
        return {"label_r", at, label};
    }
    if (a.kind == ProcKind::SendMuRight) {
        assert(junction.type->kind == TypeKind::Var && junction.type->var == a.type_var);
        assert(b.type_var == a.type_var);
        const SigEntry* entry = c.program.sig.find(a.type_var);
        assert(entry && entry->polarity == Polarity::Mu);
        junction.type = entry->body;
        std::string payload = fmt::format("mu_{}", a.type_var);
        c.procs[i].code = a.cont;
        c.procs[i + 1].code = b.cont;
        return {"mu_r", at, payload};
    }
    if (a.kind == ProcKind::CloseRight) {
        // The closer has no left channel, so it is the leftmost process.
        assert(i == 0 && !c.ext_left);
        c.procs[1].code = b.cont;
        c.procs.erase(c.procs.begin());
        c.junctions.erase(c.junctions.begin());
        return {"close", at, "close"};
    }
    if (b.kind == ProcKind::SendLabelLeft) {
        assert(junction.type->kind == TypeKind::External);
        const TypeBranch* ty = find_branch(*junction.type, b.label);
        const ProcBranch* target = nullptr;
        for (const auto& br : a.branches)
            if (br.label == b.label)
                target = &br;
        assert(ty && target);
        junction.type = ty->type;
        std::string label = b.label;
        c.procs[i].code = target->body;
        c.procs[i + 1].code = b.cont;
        return {"label_l", at, label};
    }
    assert(b.kind == ProcKind::SendNuLeft);
    assert(junction.type->kind == TypeKind::Var && junction.type->var == b.type_var);
    assert(a.type_var == b.type_var);
    const SigEntry* entry = c.program.sig.find(b.type_var);
    assert(entry && entry->polarity == Polarity::Nu);
    junction.type = entry->body;
    std::string payload = fmt::format("nu_{}", b.type_var);
    c.procs[i].code = a.cont;
    c.procs[i + 1].code = b.cont;
    return {"nu_l", at, payload};
}

// Which side the head action addresses, for poise classification. Cut and
// call are always redexes and never reach this.
enum class HeadSide { Left, Right, Either };

HeadSide head_side(const Proc& p) {
    switch (p.kind) {
        case ProcKind::SendLabelLeft:
        case ProcKind::CaseLeft:
        case ProcKind::WaitLeft:
        case ProcKind::CaseMuLeft:
        case ProcKind::SendNuLeft:
            return HeadSide::Left;
        case ProcKind::Forward:
            return HeadSide::Either;
        default:
            return HeadSide::Right;
    }
}

std::string head_action(const Proc& p) {
    switch (p.kind) {
        case ProcKind::SendLabelRight:
        case ProcKind::SendLabelLeft:
            return fmt::format("send label {}", p.label);
        case ProcKind::SendMuRight:
            return fmt::format("send mu_{}", p.type_var);
        case ProcKind::SendNuLeft:
            return fmt::format("send nu_{}", p.type_var);
        case ProcKind::CaseLeft:
        case ProcKind::CaseRight:
        case ProcKind::CaseMuLeft:
        case ProcKind::CaseNuRight:
            return "receive";
        case ProcKind::CloseRight:
            return "close";
        case ProcKind::WaitLeft:
            return "wait";
        case ProcKind::Forward:
            return "forward";
        default:
            return "";
    }
}

// First process whose pending action addresses an external endpoint. A lone
// forwarder waits on the side its session type receives from: positive
// types flow rightward, so it waits on the left.
std::optional<std::pair<std::string, std::string>> find_poised(const Configuration& c) {
    for (size_t i = 0; i < c.procs.size(); ++i) {
        const Proc& head = *c.procs[i].code;
        HeadSide side = head_side(head);
        if (side == HeadSide::Either) {
            if (c.procs.size() > 1)
                continue; // eliminable forwarder, not poised
            bool left = positive_type(c.program.sig, c.ext_right->type);
            return std::make_pair(left ? "left" : "right", head_action(head));
        }
        if (side == HeadSide::Left && i == 0 && c.ext_left)
            return std::make_pair(std::string("left"), head_action(head));
        if (side == HeadSide::Right && i + 1 == c.procs.size())
            return std::make_pair(std::string("right"), head_action(head));
    }
    return std::nullopt;
}

} // namespace

Configuration load_def(const Program& p, const std::string& name) {
    const ProcDef* def = p.find_def(name);
    assert(def);
    Configuration c;
    c.program = p;
    auto call = std::make_shared<Proc>();
    call->kind = ProcKind::Call;
    call->callee = name;
    c.procs.push_back({std::move(call)});
    if (def->left)
        c.ext_left = Endpoint{def->left_port, *def->left};
    c.ext_right = Endpoint{def->right_port, def->right};
    return c;
}

Configuration load(const Program& p) {
    assert(p.main_name);
    return load_def(p, *p.main_name);
}

namespace {

Diags merge_programs(Program& into, const Program& from) {
    Diags errs;
    for (const auto& entry : from.sig.entries) {
        const SigEntry* have = into.sig.find(entry.name);
        if (!have) {
            into.sig.entries.push_back(entry);
            continue;
        }
        if (have->priority != entry.priority || have->polarity != entry.polarity ||
            !types_equal(have->body, entry.body))
            errs.push_back(
                {entry.span, fmt::format("type '{}' differs between the configurations",
                                         entry.name)});
    }
    for (const auto& def : from.defs) {
        const ProcDef* have = into.defs.empty() ? nullptr : into.find_def(def.name);
        if (!have) {
            into.defs.push_back(def);
            continue;
        }
        bool same_left = have->left.has_value() == def.left.has_value() &&
                         (!def.left || types_equal(*have->left, *def.left));
        if (!same_left || !types_equal(have->right, def.right) ||
            !proc_identical(have->body, def.body))
            errs.push_back(
                {def.span, fmt::format("process '{}' differs between the configurations",
                                       def.name)});
    }
    return errs;
}

} // namespace

ComposeResult compose(const Configuration& a, const Configuration& b) {
    if (a.empty())
        return {b, {}};
    if (b.empty())
        return {a, {}};

    ComposeResult res;
    if (!b.ext_left) {
        res.errors.push_back(
            {{}, "type mismatch at the junction: the right configuration has no left endpoint"});
        return res;
    }
    if (!types_equal(a.ext_right->type, b.ext_left->type)) {
        res.errors.push_back({{},
                              fmt::format("type mismatch at the junction: {} vs {}",
                                          print_type(a.ext_right->type),
                                          print_type(b.ext_left->type))});
        return res;
    }

    Configuration out;
    out.program = a.program;
    append(res.errors, merge_programs(out.program, b.program));
    if (!res.errors.empty())
        return res;

    out.procs = a.procs;
    out.procs.insert(out.procs.end(), b.procs.begin(), b.procs.end());
    out.junctions = a.junctions;
    out.junctions.push_back({"", a.ext_right->type});
    out.junctions.insert(out.junctions.end(), b.junctions.begin(), b.junctions.end());
    for (size_t i = 0; i < out.junctions.size(); ++i)
        out.junctions[i].name = fmt::format("c{}", i);
    out.ext_left = a.ext_left;
    out.ext_right = b.ext_right;
    out.name_counter = a.name_counter + b.name_counter;
    res.config = std::move(out);
    return res;
}

std::optional<StepInfo> step(Configuration& c) {
    std::optional<Redex> redex = find_redex(c);
    if (!redex)
        return std::nullopt;
    switch (redex->kind) {
        case Redex::Spawn: return apply_spawn(c, redex->at);
        case Redex::Def: return apply_def(c, redex->at);
        case Redex::Fwd: return apply_fwd(c, redex->at);
        case Redex::Handshake: return apply_handshake(c, redex->at);
    }
    return std::nullopt;
}

RunOutcome run(Configuration c, int fuel) {
    RunOutcome out;
    for (;;) {
        if (c.empty()) {
            out.status = RunStatus::EmptyConfig;
            return out;
        }
        if (!find_redex(c)) {
            auto poised = find_poised(c);
            if (poised) {
                out.status = RunStatus::ExternalPoised;
                out.side = poised->first;
                out.action = poised->second;
            } else {
                out.status = RunStatus::StuckError;
                out.action =
                    "no transition applies and no process is poised on an external endpoint";
            }
            return out;
        }
        if (out.steps >= fuel) {
            out.status = RunStatus::FuelExhausted;
            return out;
        }
        std::optional<StepInfo> info = step(c);
        assert(info);
        out.trace.push_back({out.steps, info->rule, info->junction, info->payload});
        out.steps += 1;
    }
}

Diags typecheck_configuration(const Configuration& c) {
    if (c.empty())
        return {};
    assert(c.junctions.size() + 1 == c.procs.size());
    assert(c.ext_right);
    Diags errs;
    for (size_t i = 0; i < c.procs.size(); ++i) {
        std::optional<TypePtr> left;
        if (i == 0) {
            if (c.ext_left)
                left = c.ext_left->type;
        } else {
            left = c.junctions[i - 1].type;
        }
        TypePtr right = i + 1 < c.procs.size() ? c.junctions[i].type : c.ext_right->type;
        append(errs, check_process(c.program, left, right, c.procs[i].code));
    }
    return errs;
}

PreservationResult assert_preservation(const Configuration& before, const Configuration& after) {
    Diags errs = typecheck_configuration(after);
    if (!errs.empty()) {
        std::string detail = "configuration no longer typechecks:";
        for (const auto& e : errs)
            detail += fmt::format(" {}", e.message);
        return {false, detail};
    }
    bool left_same = before.ext_left.has_value() == after.ext_left.has_value() &&
                     (!before.ext_left || types_equal(before.ext_left->type, after.ext_left->type));
    bool right_same =
        before.ext_right.has_value() == after.ext_right.has_value() &&
        (!before.ext_right || types_equal(before.ext_right->type, after.ext_right->type));
    if (!left_same || !right_same)
        return {false, "external endpoint types changed across the step"};
    return {};
}

} // namespace ssl
