#include "mmplan/planner.hpp"

#include <algorithm>
#include <string>

#include "mmplan/motion.hpp"

namespace mmplan::planner {

Selection select_next_item(std::span<const double> travel_times) {
    Selection best{kInf, -1};
    for (std::size_t s = 0; s < travel_times.size(); ++s) {
        if (travel_times[s] < best.travel) best = {travel_times[s], static_cast<int>(s)};
    }
    if (best.item < 0) throw AllInfinite("no finite travel time among the candidates");
    return best;
}

Plan plan(const sim::DigitalModel& model, const packing::PlacementLayout& layout,
          const human::HumanSchedule& schedule, const NormStats& stats, const PsoParams& params,
          const PlannerOptions& options) {
    const auto& sc = model.scenario();
    const auto calls_before = model.calls();
    opt::SearchOptions search{options.mode, options.jobs, options.observer};

    Plan out;
    BasePose x0(static_cast<std::size_t>(sc.robot.base.dof), 0.0);
    double t_c = 0.0;
    std::uint64_t spot_key = 0;

    for (int i = 0; i < sc.type_count(); ++i) {
        const auto& item_type = sc.items[static_cast<std::size_t>(i)];
        const double t_w = stats.types.at(static_cast<std::size_t>(i)).mu_t + stats.mu_tvp;
        std::vector<bool> packed(item_type.pick_poses.size(), false);
        int placed = 0;

        for (int b : sc.boxes_of_type(i)) {
            const auto& spots = layout.spots.at(static_cast<std::size_t>(b));
            for (std::size_t k = 0; k < spots.size() && placed < item_type.count; ++k) {
                const opt::SpotRequest request{i, spots[k], packed, t_c, t_w, spot_key++};
                const auto outcomes = opt::run_pso(model, request, stats, schedule, params, search);

                std::vector<std::optional<BasePose>> candidates;
                for (const auto& o : outcomes) {
                    candidates.push_back(o.x_bar);
                    if (o.status == opt::ItemStatus::Optimized || o.status == opt::ItemStatus::AllInfeasible) {
                        out.best_psi = std::min(out.best_psi, o.psi);
                    }
                }
                const auto travel =
                    motion::compute_travel_times(candidates, x0, sc.robot.base.v_max, sc.robot.base.a_max);
                Selection sel;
                try {
                    sel = select_next_item(travel);
                } catch (const AllInfinite&) {
                    throw PlanInfeasible("no feasible item for type " + std::to_string(i) + ", box " +
                                         std::to_string(b) + ", spot " + std::to_string(k));
                }
                const auto& o = outcomes[static_cast<std::size_t>(sel.item)];
                const auto limits =
                    human::scale_params(sc.robot.v_tcp, sc.robot.a_tcp, o.kappa, sc.scaling.levels());

                RobotTask task;
                task.type = i;
                task.item = sel.item;
                task.box = b;
                task.spot = static_cast<int>(k);
                task.pick = item_type.pick_poses[static_cast<std::size_t>(sel.item)];
                task.place = spots[k];
                task.base = *o.x_bar;
                task.kappa = o.kappa;
                task.v_scaled = limits.v;
                task.a_scaled = limits.a;
                task.travel = sel.travel;
                task.wait = o.wait;
                task.t_pp = o.t_pp;
                task.delta_bar = o.delta;
                task.psi_best = o.psi;
                task.start = t_c;
                task.end = t_c + task.travel + task.wait + task.t_pp;

                out.x_star.push_back(task.base);
                out.theta_star.push_back(task.item);
                out.kappa_star.push_back(task.kappa);
                packed[static_cast<std::size_t>(sel.item)] = true;
                ++placed;
                x0 = task.base;
                t_c = task.end;
                out.tasks.push_back(std::move(task));
            }
        }
        if (placed < item_type.count) {
            throw PlanInfeasible("boxes of type " + std::to_string(i) + " cannot hold all items");
        }
    }
    out.total_time = t_c;
    out.sim_calls = model.calls() - calls_before;
    return out;
}

}  // namespace mmplan::planner
