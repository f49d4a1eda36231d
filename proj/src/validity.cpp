#include "ssl/validity.hpp"

#include <fmt/core.h>

#include <cassert>

#include "ssl/visibility.hpp"

namespace ssl {

bool ValidityReport::all_valid() const {
    for (const auto& d : defs)
        if (!d.valid)
            return false;
    return true;
}

const DefVerdict* ValidityReport::find(const std::string& name) const {
    for (const auto& d : defs)
        if (d.name == name)
            return &d;
    return nullptr;
}

namespace {

std::string failure_reason(const CombinedResult& res) {
    switch (res.clause) {
        case 1:
            return fmt::format("prefix at priority {} is incomparable with the snapshot",
                               res.prefix_at);
        case 2:
            return res.cmp == LexResult::Le
                       ? "channels do not strictly decrease from the snapshot"
                       : "channels are incomparable with the snapshot";
        default:
            return res.cmp == LexResult::Le
                       ? fmt::format("prefix at priority {} does not strictly decrease from "
                                     "the snapshot",
                                     res.prefix_at)
                       : fmt::format("prefix at priority {} is incomparable with the snapshot",
                                     res.prefix_at);
    }
}

class Walker {
public:
    Walker(const Program& prog, const ProcOrder& order, const ProcDef& def,
           ValidityObserver* obs)
        : prog_(prog), order_(order), obs_(obs), prios_(prog.sig.priorities()) {
        verdict_.name = def.name;
    }

    DefVerdict run(const ProcDef& def, int start_gen) {
        std::optional<GenChannel> left;
        if (def.left)
            left = GenChannel{def.left_port, start_gen};
        GenChannel right{def.right_port, start_gen};
        root_ = CallChannels{def.name, left, right};
        if (obs_)
            obs_->on_def(def);
        walk(def.body, std::move(left), std::move(right), Omega{});
        return std::move(verdict_);
    }

private:
    const Program& prog_;
    const ProcOrder& order_;
    ValidityObserver* obs_;
    std::vector<int> prios_;
    CallChannels root_;
    DefVerdict verdict_;

    void step(const ProcPtr& p, const std::optional<GenChannel>& left, const GenChannel& right,
              const Omega& om) {
        if (obs_)
            obs_->on_step(*p, left, right, om);
    }

    // Relate two generations of one channel across an unfolding at
    // priority `unfold_at`: strictly below there when `strict_at_unfold`,
    // equal at every other tracked priority, silent at `unfold_at` otherwise.
    void relate_generations(Omega& om, const std::string& base, int old_gen, int new_gen,
                            int unfold_at, bool strict_at_unfold) {
        for (int i : prios_) {
            OrderVar fresh{base, new_gen, i};
            OrderVar old{base, old_gen, i};
            if (i != unfold_at)
                om.add_eq(fresh, old);
            else if (strict_at_unfold)
                om.add_lt(fresh, old);
        }
    }

    void walk(const ProcPtr& p, std::optional<GenChannel> left, GenChannel right, Omega om) {
        switch (p->kind) {
            case ProcKind::Forward:
            case ProcKind::CloseRight:
                step(p, left, right, om);
                return;
            case ProcKind::SendLabelRight:
            case ProcKind::SendLabelLeft:
                step(p, left, right, om);
                walk(p->cont, std::move(left), std::move(right), std::move(om));
                return;
            case ProcKind::WaitLeft:
                left.reset();
                step(p, left, right, om);
                walk(p->cont, std::move(left), std::move(right), std::move(om));
                return;
            case ProcKind::CaseLeft:
            case ProcKind::CaseRight: {
                step(p, left, right, om);
                for (const auto& br : p->branches) {
                    if (obs_) {
                        obs_->on_push();
                        obs_->on_branch(*p, br.label);
                    }
                    walk(br.body, left, right, om);
                    if (obs_)
                        obs_->on_pop();
                }
                return;
            }
            case ProcKind::CaseMuLeft: {
                assert(left);
                int pt = priority_of(prog_.sig, p->type_var);
                relate_generations(om, left->base, left->gen, left->gen + 1, pt, true);
                left->gen += 1;
                step(p, left, right, om);
                walk(p->cont, std::move(left), std::move(right), std::move(om));
                return;
            }
            case ProcKind::CaseNuRight: {
                int pt = priority_of(prog_.sig, p->type_var);
                relate_generations(om, right.base, right.gen, right.gen + 1, pt, true);
                right.gen += 1;
                step(p, left, right, om);
                walk(p->cont, std::move(left), std::move(right), std::move(om));
                return;
            }
            case ProcKind::SendMuRight: {
                int pt = priority_of(prog_.sig, p->type_var);
                relate_generations(om, right.base, right.gen, right.gen + 1, pt, false);
                right.gen += 1;
                step(p, left, right, om);
                walk(p->cont, std::move(left), std::move(right), std::move(om));
                return;
            }
            case ProcKind::SendNuLeft: {
                assert(left);
                int pt = priority_of(prog_.sig, p->type_var);
                relate_generations(om, left->base, left->gen, left->gen + 1, pt, false);
                left->gen += 1;
                step(p, left, right, om);
                walk(p->cont, std::move(left), std::move(right), std::move(om));
                return;
            }
            case ProcKind::Cut: {
                step(p, left, right, om);
                std::set<int> visible = visible_priorities(prog_.sig, p->cut_type);
                GenChannel fresh{p->cut_channel, 0};

                // Head provides the fresh channel on its right; at every
                // priority the cut type can never unfold, the fresh channel
                // inherits the standing of the channel it replaces.
                Omega head_om = om;
                for (int i : prios_)
                    if (!visible.count(i))
                        head_om.add_eq({fresh.base, fresh.gen, i}, {right.base, right.gen, i});
                if (obs_) {
                    obs_->on_push();
                    obs_->on_cut_half(*p, true);
                }
                walk(p->cut_head, left, fresh, std::move(head_om));
                if (obs_)
                    obs_->on_pop();

                Omega tail_om = std::move(om);
                if (left)
                    for (int i : prios_)
                        if (!visible.count(i))
                            tail_om.add_eq({fresh.base, fresh.gen, i},
                                           {left->base, left->gen, i});
                if (obs_) {
                    obs_->on_push();
                    obs_->on_cut_half(*p, false);
                }
                walk(p->cut_tail, fresh, std::move(right), std::move(tail_om));
                if (obs_)
                    obs_->on_pop();
                return;
            }
            case ProcKind::Call: {
                step(p, left, right, om);
                CallChannels site{p->callee, left, right};
                CombinedResult res = combined_less(prog_.sig, order_, om, site, root_);
                if (obs_)
                    obs_->on_call(*p, res, site, root_);
                if (!res.ok) {
                    verdict_.valid = false;
                    verdict_.failing.push_back(
                        {p->callee, p->span, res.clause, failure_reason(res)});
                }
                return;
            }
        }
    }
};

} // namespace

DefVerdict check_def_validity(const Program& prog, const ProcOrder& order, const ProcDef& def,
                              int start_gen, ValidityObserver* obs) {
    return Walker(prog, order, def, obs).run(def, start_gen);
}

ValidityReport check_validity(const Program& prog, int start_gen, ValidityObserver* obs) {
    ProcOrder::BuildResult built = ProcOrder::build(prog);
    assert(built.errors.empty());
    ValidityReport report;
    for (const auto& def : prog.defs)
        report.defs.push_back(check_def_validity(prog, built.order, def, start_gen, obs));
    return report;
}

} // namespace ssl
