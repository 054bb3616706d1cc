#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mmplan/core.hpp"

namespace mmplan::human {

/// Operator position; std::nullopt means "away from the cell" (infinitely far).
using Position = std::optional<Eigen::Vector3d>;

struct HumanTask {
    std::string kind;     // CreateBox, BringItems, FillPallet, Offline, ...
    std::string station;  // free-form label, e.g. "A"
    double start = 0.0;   // tau_h
    Position position;    // p_h
};

/// Deterministic operator schedule. Task c is active on [start_c, start_{c+1});
/// the last task persists forever.
struct HumanSchedule {
    std::vector<HumanTask> tasks;

    std::size_t size() const { return tasks.size(); }
};

/// Schedule with a single Offline task at t = 0 and no position.
HumanSchedule offline_schedule();

std::vector<std::string> validate_schedule(const HumanSchedule& schedule);

/// Position of the task active at t (nullopt before the first start).
Position human_position_at(const HumanSchedule& schedule, double t);

/// Indices (0-based) of tasks whose active interval intersects [t_c, t_c + t_w).
std::vector<int> tasks_in_window(const HumanSchedule& schedule, double t_c, double t_w);

/// Euclidean distance; +inf when the operator is away.
double distance_to(const Position& p, const Eigen::Vector3d& point);

struct ScaleDecision {
    int kappa = 0;
    double d_min = kInf;
    std::vector<int> window;
};

/// Look-ahead scaling level: smallest operator distance to the pick or place
/// point over every task in the window, mapped through the distance bands.
ScaleDecision receding_horizon_scale(const HumanSchedule& schedule, double t_c, double t_w,
                                     const Eigen::Vector3d& pick, const Eigen::Vector3d& place,
                                     const ScalingPolicy& policy);

/// Scaled TCP limits: v = v_R - kappa * v_R / (n_k - 1), likewise for a.
struct ScaledLimits {
    double v = 0.0;
    double a = 0.0;
};
ScaledLimits scale_params(double v_r, double a_r, int kappa, int n_k);

class BadKappa : public Error {
public:
    using Error::Error;
};

struct HoldDecision {
    double wait = 0.0;  // seconds to hold before the motion may start
    ScaleDecision decision;
    bool feasible = true;  // false when the operator never leaves the stop band
};

/// Earliest wait w >= 0 such that the scaling level at t_c + w is below the
/// full-stop level n_k - 1.
HoldDecision hold_until_clear(const HumanSchedule& schedule, double t_c, double t_w,
                              const Eigen::Vector3d& pick, const Eigen::Vector3d& place,
                              const ScalingPolicy& policy);

}  // namespace mmplan::human
