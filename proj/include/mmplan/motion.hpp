#pragma once

#include <span>
#include <vector>

#include "mmplan/core.hpp"

namespace mmplan::motion {

/// Rest-to-rest duration of a trapezoidal velocity profile. Distances shorter
/// than v^2/a produce the triangular profile.
double tvp_duration(double distance, double v_max, double a_max);

struct ProfileState {
    double position = 0.0;
    double velocity = 0.0;
};

/// State of the same profile at time t in [0, tvp_duration].
ProfileState tvp_sample(double distance, double v_max, double a_max, double t);

/// Synchronized-axis travel time: max over DOFs of the per-axis TVP duration.
double travel_time(const BasePose& from, const BasePose& to, double v_max, double a_max);

/// Travel time from x0 to every candidate; candidates without a pose are +inf.
std::vector<double> compute_travel_times(std::span<const std::optional<BasePose>> candidates,
                                         const BasePose& x0, double v_max, double a_max);

}  // namespace mmplan::motion
