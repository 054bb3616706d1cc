#include "mmplan/human.hpp"

#include <algorithm>
#include <cmath>

namespace mmplan::human {

HumanSchedule offline_schedule() {
    return HumanSchedule{{HumanTask{"Offline", "-", 0.0, std::nullopt}}};
}

std::vector<std::string> validate_schedule(const HumanSchedule& schedule) {
    std::vector<std::string> out;
    if (schedule.tasks.empty()) out.emplace_back("schedule has no tasks");
    for (std::size_t c = 0; c < schedule.size(); ++c) {
        const auto& task = schedule.tasks[c];
        if (!std::isfinite(task.start) || task.start < 0.0) {
            out.push_back("task " + std::to_string(c) + ": start time must be finite and >= 0");
        }
        if (c > 0 && !(task.start > schedule.tasks[c - 1].start)) {
            out.push_back("task " + std::to_string(c) + ": start times must be strictly increasing");
        }
        if (task.kind == "Offline" && task.position) {
            out.push_back("task " + std::to_string(c) + ": Offline task cannot carry a position");
        }
        if (task.kind != "Offline" && !task.position) {
            out.push_back("task " + std::to_string(c) + ": only Offline tasks may omit the position");
        }
    }
    return out;
}

Position human_position_at(const HumanSchedule& schedule, double t) {
    // Last task whose start is <= t.
    const auto it = std::upper_bound(schedule.tasks.begin(), schedule.tasks.end(), t,
                                     [](double v, const HumanTask& task) { return v < task.start; });
    if (it == schedule.tasks.begin()) return std::nullopt;
    return std::prev(it)->position;
}

std::vector<int> tasks_in_window(const HumanSchedule& schedule, double t_c, double t_w) {
    if (!(t_w > 0.0)) throw Error("look-ahead window must be positive");
    std::vector<int> out;
    const double t_end = t_c + t_w;
    for (std::size_t c = 0; c < schedule.size(); ++c) {
        const double begin = schedule.tasks[c].start;
        const double end = c + 1 < schedule.size() ? schedule.tasks[c + 1].start : kInf;
        if (begin < t_end && end > t_c) out.push_back(static_cast<int>(c));
    }
    return out;
}

double distance_to(const Position& p, const Eigen::Vector3d& point) {
    if (!p) return kInf;
    return (*p - point).norm();
}

ScaleDecision receding_horizon_scale(const HumanSchedule& schedule, double t_c, double t_w,
                                     const Eigen::Vector3d& pick, const Eigen::Vector3d& place,
                                     const ScalingPolicy& policy) {
    ScaleDecision out;
    out.window = tasks_in_window(schedule, t_c, t_w);
    for (int c : out.window) {
        const auto& p = schedule.tasks[static_cast<std::size_t>(c)].position;
        out.d_min = std::min({out.d_min, distance_to(p, pick), distance_to(p, place)});
    }
    out.kappa = scaling_band(policy, out.d_min);
    return out;
}

ScaledLimits scale_params(double v_r, double a_r, int kappa, int n_k) {
    if (n_k < 2 || kappa < 0 || kappa > n_k - 1) {
        throw BadKappa("scaling level " + std::to_string(kappa) + " outside [0, " +
                       std::to_string(n_k - 1) + "]");
    }
    const double steps = static_cast<double>(n_k - 1);
    return {v_r - kappa * v_r / steps, a_r - kappa * a_r / steps};
}

HoldDecision hold_until_clear(const HumanSchedule& schedule, double t_c, double t_w,
                              const Eigen::Vector3d& pick, const Eigen::Vector3d& place,
                              const ScalingPolicy& policy) {
    const int stop = policy.levels() - 1;
    HoldDecision out;
    out.decision = receding_horizon_scale(schedule, t_c, t_w, pick, place, policy);
    if (out.decision.kappa < stop) return out;

    // The level can only relax when a task leaves the window, i.e. at task ends.
    for (std::size_t c = 1; c < schedule.size(); ++c) {
        const double w = schedule.tasks[c].start - t_c;
        if (w <= 0.0) continue;
        auto d = receding_horizon_scale(schedule, t_c + w, t_w, pick, place, policy);
        if (d.kappa < stop) {
            out.wait = w;
            out.decision = std::move(d);
            return out;
        }
    }
    out.feasible = false;
    return out;
}

}  // namespace mmplan::human
