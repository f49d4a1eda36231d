#include "ssl/guard.hpp"

#include <fmt/core.h>

#include <cassert>
#include <set>

#include "ssl/visibility.hpp"

namespace ssl {

const char* to_string(CycleClass c) {
    switch (c) {
        case CycleClass::LeftMuTrace: return "left-mu-trace";
        case CycleClass::RightNuTrace: return "right-nu-trace";
        case CycleClass::Both: return "both";
        case CycleClass::Neither: return "neither";
    }
    return "neither";
}

bool GuardReport::all_guarded() const {
    for (const auto& d : defs)
        if (!d.guarded)
            return false;
    return true;
}

namespace {

const char* rule_name(ProcKind k) {
    switch (k) {
        case ProcKind::Forward: return "id";
        case ProcKind::Cut: return "cut";
        case ProcKind::SendLabelRight: return "+R";
        case ProcKind::CaseLeft: return "+L";
        case ProcKind::SendLabelLeft: return "&L";
        case ProcKind::CaseRight: return "&R";
        case ProcKind::CloseRight: return "1R";
        case ProcKind::WaitLeft: return "1L";
        case ProcKind::SendMuRight: return "muR";
        case ProcKind::CaseMuLeft: return "muL";
        case ProcKind::SendNuLeft: return "nuL";
        case ProcKind::CaseNuRight: return "nuR";
        case ProcKind::Call: return "def";
    }
    return "";
}

class Unfolder {
public:
    Unfolder(const Program& prog, int depth)
        : prog_(prog), depth_(depth), prios_(prog.sig.priorities()) {}

    DerivNode root(const ProcDef& def) {
        used_bases_.insert(def.left_port);
        used_bases_.insert(def.right_port);
        auto call = std::make_shared<Proc>();
        call->kind = ProcKind::Call;
        call->callee = def.name;
        std::optional<DerivChannel> left;
        if (def.left)
            left = DerivChannel{{def.left_port, 0}, *def.left};
        DerivChannel right{{def.right_port, 0}, def.right};
        return walk(call, std::move(left), std::move(right), Omega{}, 0);
    }

private:
    const Program& prog_;
    int depth_;
    std::vector<int> prios_;
    std::set<std::string> used_bases_;

    std::string fresh_base(const std::string& want) {
        std::string base = want;
        while (!used_bases_.insert(base).second)
            base += "'";
        return base;
    }

    void relate_generations(Omega& om, const std::string& base, int old_gen, int unfold_at,
                            bool strict_at_unfold) {
        for (int i : prios_) {
            if (i != unfold_at)
                om.add_eq({base, old_gen + 1, i}, {base, old_gen, i});
            else if (strict_at_unfold)
                om.add_lt({base, old_gen + 1, i}, {base, old_gen, i});
        }
    }

    DerivNode walk(const ProcPtr& p, std::optional<DerivChannel> left, DerivChannel right,
                   Omega om, int expansions) {
        DerivNode node;
        node.proc = p;
        node.left = left;
        node.right = right;
        node.omega = om;
        node.rule = rule_name(p->kind);

        switch (p->kind) {
            case ProcKind::Forward:
            case ProcKind::CloseRight:
                break;
            case ProcKind::SendLabelRight: {
                const TypeBranch* br = find_branch(*right.type, p->label);
                assert(br);
                right.type = br->type;
                node.children.push_back(
                    walk(p->cont, std::move(left), std::move(right), std::move(om), expansions));
                break;
            }
            case ProcKind::SendLabelLeft: {
                assert(left);
                const TypeBranch* br = find_branch(*left->type, p->label);
                assert(br);
                left->type = br->type;
                node.children.push_back(
                    walk(p->cont, std::move(left), std::move(right), std::move(om), expansions));
                break;
            }
            case ProcKind::WaitLeft:
                node.children.push_back(
                    walk(p->cont, std::nullopt, std::move(right), std::move(om), expansions));
                break;
            case ProcKind::CaseLeft: {
                assert(left);
                for (const auto& br : p->branches) {
                    const TypeBranch* ty = find_branch(*left->type, br.label);
                    assert(ty);
                    DerivChannel bl{left->chan, ty->type};
                    node.children.push_back(walk(br.body, bl, right, om, expansions));
                }
                break;
            }
            case ProcKind::CaseRight: {
                for (const auto& br : p->branches) {
                    const TypeBranch* ty = find_branch(*right.type, br.label);
                    assert(ty);
                    DerivChannel brc{right.chan, ty->type};
                    node.children.push_back(walk(br.body, left, brc, om, expansions));
                }
                break;
            }
            case ProcKind::CaseMuLeft: {
                assert(left);
                relate_generations(om, left->chan.base, left->chan.gen,
                                   priority_of(prog_.sig, p->type_var), true);
                left->chan.gen += 1;
                left->type = prog_.sig.find(p->type_var)->body;
                node.children.push_back(
                    walk(p->cont, std::move(left), std::move(right), std::move(om), expansions));
                break;
            }
            case ProcKind::CaseNuRight: {
                relate_generations(om, right.chan.base, right.chan.gen,
                                   priority_of(prog_.sig, p->type_var), true);
                right.chan.gen += 1;
                right.type = prog_.sig.find(p->type_var)->body;
                node.children.push_back(
                    walk(p->cont, std::move(left), std::move(right), std::move(om), expansions));
                break;
            }
            case ProcKind::SendMuRight: {
                relate_generations(om, right.chan.base, right.chan.gen,
                                   priority_of(prog_.sig, p->type_var), false);
                right.chan.gen += 1;
                right.type = prog_.sig.find(p->type_var)->body;
                node.children.push_back(
                    walk(p->cont, std::move(left), std::move(right), std::move(om), expansions));
                break;
            }
            case ProcKind::SendNuLeft: {
                assert(left);
                relate_generations(om, left->chan.base, left->chan.gen,
                                   priority_of(prog_.sig, p->type_var), false);
                left->chan.gen += 1;
                left->type = prog_.sig.find(p->type_var)->body;
                node.children.push_back(
                    walk(p->cont, std::move(left), std::move(right), std::move(om), expansions));
                break;
            }
            case ProcKind::Cut: {
                std::set<int> visible = visible_priorities(prog_.sig, p->cut_type);
                DerivChannel fresh{{fresh_base(p->cut_channel), 0}, p->cut_type};

                Omega head_om = om;
                for (int i : prios_)
                    if (!visible.count(i))
                        head_om.add_eq({fresh.chan.base, 0, i},
                                       {right.chan.base, right.chan.gen, i});
                node.children.push_back(
                    walk(p->cut_head, left, fresh, std::move(head_om), expansions));

                Omega tail_om = std::move(om);
                if (left)
                    for (int i : prios_)
                        if (!visible.count(i))
                            tail_om.add_eq({fresh.chan.base, 0, i},
                                           {left->chan.base, left->chan.gen, i});
                node.children.push_back(
                    walk(p->cut_tail, fresh, std::move(right), std::move(tail_om), expansions));
                break;
            }
            case ProcKind::Call: {
                if (expansions >= depth_)
                    break;
                const ProcDef* callee = prog_.find_def(p->callee);
                assert(callee);
                std::optional<DerivChannel> body_left = std::move(left);
                if (body_left)
                    body_left->type = *callee->left;
                DerivChannel body_right{right.chan, callee->right};
                node.children.push_back(walk(callee->body, std::move(body_left),
                                             std::move(body_right), std::move(om),
                                             expansions + 1));
                break;
            }
        }
        return node;
    }
};

void collect_cycles(const DerivNode& node, std::vector<std::pair<const DerivNode*, size_t>>& calls,
                    std::vector<std::string>& path, std::vector<Cycle>& out) {
    if (node.proc->kind == ProcKind::Call) {
        for (const auto& [anc, pos] : calls) {
            if (anc->proc->callee != node.proc->callee)
                continue;
            Cycle c;
            c.start = anc;
            c.end = &node;
            c.callee = node.proc->callee;
            c.path.assign(path.begin() + static_cast<long>(pos), path.end());
            c.path.push_back(node.rule);
            out.push_back(std::move(c));
        }
    }
    path.push_back(node.rule);
    if (node.proc->kind == ProcKind::Call)
        calls.emplace_back(&node, path.size());
    for (const auto& child : node.children)
        collect_cycles(child, calls, path, out);
    path.pop_back();
    if (node.proc->kind == ProcKind::Call)
        calls.pop_back();
}

std::vector<ListSlot> priority_slots(const std::vector<int>& prios, const GenChannel& chan) {
    std::vector<ListSlot> slots;
    for (int i : prios)
        slots.push_back({true, {chan.base, chan.gen, i}});
    return slots;
}

std::string render_channel(const std::optional<DerivChannel>& c) {
    return c ? fmt::format("{}^{}", c->chan.base, c->chan.gen) : std::string{};
}

} // namespace

DerivNode unfold(const Program& p, const std::string& def, int depth) {
    const ProcDef* d = p.find_def(def);
    assert(d);
    return Unfolder(p, depth).root(*d);
}

std::vector<Cycle> find_cycles(const DerivNode& root) {
    std::vector<Cycle> out;
    std::vector<std::pair<const DerivNode*, size_t>> calls;
    std::vector<std::string> path;
    collect_cycles(root, calls, path, out);
    return out;
}

CycleClass classify_cycle(const Signature& sig, const Cycle& c) {
    std::vector<int> prios = sig.priorities();
    const Omega& om = c.end->omega;

    bool left_trace = false;
    if (c.start->left && c.end->left && !prios.empty() &&
        c.start->left->chan.base == c.end->left->chan.base) {
        left_trace = lex_compare(om, priority_slots(prios, c.end->left->chan),
                                 priority_slots(prios, c.start->left->chan)) == LexResult::Lt;
    }
    bool right_trace = !prios.empty() &&
                       lex_compare(om, priority_slots(prios, c.end->right.chan),
                                   priority_slots(prios, c.start->right.chan)) == LexResult::Lt;

    if (left_trace && right_trace)
        return CycleClass::Both;
    if (left_trace)
        return CycleClass::LeftMuTrace;
    if (right_trace)
        return CycleClass::RightNuTrace;
    return CycleClass::Neither;
}

GuardReport check_guard(const Program& p, int depth) {
    GuardReport report;
    report.depth = depth;
    for (const auto& def : p.defs) {
        DefGuard dg;
        dg.name = def.name;
        DerivNode tree = unfold(p, def.name, depth);
        for (const Cycle& c : find_cycles(tree)) {
            CycleInfo info;
            info.callee = c.callee;
            info.start_left = render_channel(c.start->left);
            info.start_right = render_channel(DerivChannel{c.start->right});
            info.end_left = render_channel(c.end->left);
            info.end_right = render_channel(DerivChannel{c.end->right});
            info.length = c.path.size();
            info.cls = classify_cycle(p.sig, c);
            if (info.cls == CycleClass::Neither)
                dg.guarded = false;
            dg.cycles.push_back(std::move(info));
        }
        report.defs.push_back(std::move(dg));
    }
    return report;
}

} // namespace ssl
