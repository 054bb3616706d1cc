#include "mmplan/motion.hpp"

#include <algorithm>
#include <cmath>

namespace mmplan::motion {

namespace {

void check_limits(double v_max, double a_max) {
    if (!(v_max > 0.0) || !(a_max > 0.0)) {
        throw Error("TVP limits must be positive");
    }
}

}  // namespace

double tvp_duration(double distance, double v_max, double a_max) {
    check_limits(v_max, a_max);
    if (distance < 0.0) throw Error("negative TVP distance");
    if (distance >= v_max * v_max / a_max) return distance / v_max + v_max / a_max;
    return 2.0 * std::sqrt(distance / a_max);
}

ProfileState tvp_sample(double distance, double v_max, double a_max, double t) {
    const double total = tvp_duration(distance, v_max, a_max);
    if (t < 0.0 || t > total) throw Error("TVP sample time out of range");
    if (distance == 0.0) return {};

    // Cruise speed and ramp duration (triangle: peak reached at total/2).
    const bool trapezoid = distance >= v_max * v_max / a_max;
    const double v_peak = trapezoid ? v_max : std::sqrt(distance * a_max);
    const double t_ramp = v_peak / a_max;
    const double d_ramp = 0.5 * v_peak * t_ramp;

    if (t <= t_ramp) return {0.5 * a_max * t * t, a_max * t};
    if (t < total - t_ramp) return {d_ramp + v_peak * (t - t_ramp), v_peak};
    const double left = total - t;
    if (left <= 0.0) return {distance, 0.0};
    return {distance - 0.5 * a_max * left * left, a_max * left};
}

double travel_time(const BasePose& from, const BasePose& to, double v_max, double a_max) {
    if (from.size() != to.size()) throw Error("base pose dimension mismatch");
    double t = 0.0;
    for (std::size_t d = 0; d < from.size(); ++d) {
        t = std::max(t, tvp_duration(std::abs(to[d] - from[d]), v_max, a_max));
    }
    return t;
}

std::vector<double> compute_travel_times(std::span<const std::optional<BasePose>> candidates,
                                         const BasePose& x0, double v_max, double a_max) {
    std::vector<double> out;
    out.reserve(candidates.size());
    for (const auto& c : candidates) {
        out.push_back(c ? travel_time(x0, *c, v_max, a_max) : kInf);
    }
    return out;
}

}  // namespace mmplan::motion
