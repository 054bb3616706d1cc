#include "mmplan/core.hpp"

#include <algorithm>
#include <sstream>

#include "mmplan/kinematics.hpp"

namespace mmplan {

std::vector<int> Scenario::boxes_of_type(int type) const {
    std::vector<int> out;
    for (std::size_t b = 0; b < boxes.size(); ++b) {
        if (boxes[b].item_type == type) out.push_back(static_cast<int>(b));
    }
    return out;
}

int scaling_band(const ScalingPolicy& policy, double distance) {
    if (std::isnan(distance) || distance < 0.0) throw Error("distance must be >= 0");
    if (std::isinf(distance)) return 0;
    for (int v = 0; v < policy.levels(); ++v) {
        const auto k = static_cast<std::size_t>(v);
        if (policy.d_s_min[k] <= distance && distance < policy.d_s_max[k]) return v;
    }
    throw Error("distance not covered by any scaling band");
}

namespace {

bool positive(const Dims& d) { return d.l > 0.0 && d.w > 0.0 && d.h > 0.0; }

class Reporter {
public:
    explicit Reporter(ValidationReport& report) : report_(report) {}

    template <typename... Args>
    void fail(Args&&... args) {
        report_.violations.push_back(join(std::forward<Args>(args)...));
    }
    template <typename... Args>
    void warn(Args&&... args) {
        report_.warnings.push_back(join(std::forward<Args>(args)...));
    }

private:
    template <typename... Args>
    static std::string join(Args&&... args) {
        std::ostringstream os;
        (os << ... << args);
        return os.str();
    }
    ValidationReport& report_;
};

void check_scaling(const ScalingPolicy& s, Reporter& r) {
    const auto n = s.d_s_max.size();
    if (n < 2) r.fail("scaling: need at least 2 levels");
    if (s.d_s_min.size() != n) {
        r.fail("scaling: d_s_min and d_s_max must have the same length");
        return;
    }
    for (std::size_t v = 0; v < n; ++v) {
        if (!(s.d_s_min[v] < s.d_s_max[v])) r.fail("scaling: band ", v, " is empty");
        if (v + 1 < n) {
            if (s.d_s_min[v] != s.d_s_max[v + 1]) r.fail("scaling: bands ", v, " and ", v + 1, " are not contiguous");
            if (!(s.d_s_max[v] > s.d_s_max[v + 1])) r.fail("scaling: d_s_max must be strictly decreasing");
            if (!(s.d_s_min[v] > s.d_s_min[v + 1])) r.fail("scaling: d_s_min must be strictly decreasing");
        }
    }
    if (n > 0 && s.d_s_min.back() != 0.0) r.fail("scaling: last band must reach 0");
    if (n > 0 && !std::isinf(s.d_s_max.front())) r.warn("scaling: first band is bounded; larger distances are uncovered");
}

void check_robot(const Scenario& sc, Reporter& r) {
    const auto& robot = sc.robot;
    if (!(robot.v_tcp > 0.0) || !(robot.a_tcp > 0.0)) r.fail("robot: TCP speed and acceleration must be positive");
    if (robot.chain.joints.empty()) {
        r.fail("robot: kinematic chain is empty");
        return;
    }
    for (const auto& j : robot.chain.joints) {
        if (j.limits && !(j.limits->min < j.limits->max)) r.fail("robot: joint ", j.name, " has empty limits");
        if (!(j.v_max > 0.0) || !(j.a_max > 0.0)) r.fail("robot: joint ", j.name, " speed limits must be positive");
        if (j.axis.norm() < 1e-12) r.fail("robot: joint ", j.name, " has a zero axis");
    }
    if (robot.home.size() != robot.chain.size()) r.fail("robot: home configuration size does not match the chain");
    if (robot.ik_rows.empty() || robot.manipulability_rows.empty()) r.fail("robot: task rows must be non-empty");

    const auto& base = robot.base;
    const auto dof = static_cast<std::size_t>(base.dof);
    if (base.dof < 1) r.fail("base: N_D must be positive");
    if (base.axes.size() != dof || base.limits.size() != dof || base.footprint_half.size() != dof) {
        r.fail("base: axes, limits and footprint must have one entry per DOF");
        return;
    }
    for (std::size_t d = 0; d < dof; ++d) {
        if (!(base.limits[d].min < base.limits[d].max)) r.fail("base: limits of DOF ", d, " are empty");
    }
    for (const auto& zone : base.keep_out) {
        if (zone.size() != dof) r.fail("base: keep-out zone needs one interval per DOF");
    }
    if (!(base.v_max > 0.0) || !(base.a_max > 0.0)) r.fail("base: speed and acceleration must be positive");
}

void check_pso(const Scenario& sc, Reporter& r) {
    const auto& p = sc.pso;
    const auto dof = static_cast<std::size_t>(sc.robot.base.dof);
    if (p.iterations < 1 || p.particles < 1) r.fail("pso: iterations and particles must be >= 1");
    if (p.p_lim.size() != dof || p.v_lim.size() != dof) {
        r.fail("pso: p_lim and v_lim need one entry per base DOF");
        return;
    }
    for (std::size_t d = 0; d < dof; ++d) {
        if (!(p.p_lim[d].min < p.p_lim[d].max)) r.fail("pso: p_lim of DOF ", d, " is empty");
        if (d < sc.robot.base.limits.size() &&
            (p.p_lim[d].min < sc.robot.base.limits[d].min || p.p_lim[d].max > sc.robot.base.limits[d].max)) {
            r.fail("pso: p_lim of DOF ", d, " exceeds the rail limits");
        }
        if (p.v_lim[d].min != -p.v_lim[d].max || !(p.v_lim[d].max > 0.0)) {
            r.fail("pso: v_lim of DOF ", d, " must be symmetric around 0");
        }
    }
    if (std::abs(p.w_time + p.w_manip - 1.0) > 1e-9) r.warn("pso: KPI weights do not sum to 1");
}

// Closest distance from a point to the set of first-joint origins swept by the rail.
double distance_to_sweep(const RobotModel& robot, const Eigen::Vector3d& point) {
    Eigen::Vector3d origin = robot.base.mount + robot.chain.joints.front().origin.translation();
    Eigen::Vector3d rel = point - origin;
    for (std::size_t d = 0; d < robot.base.axes.size(); ++d) {
        const Eigen::Vector3d axis = robot.base.axes[d].normalized();
        const double s = std::clamp(rel.dot(axis), robot.base.limits[d].min, robot.base.limits[d].max);
        rel -= s * axis;
    }
    return rel.norm();
}

}  // namespace

ValidationReport validate_scenario(const Scenario& sc) {
    ValidationReport report;
    Reporter r(report);

    if (sc.items.empty()) r.fail("scenario has no item types");
    const auto types = sc.items.size();
    for (std::size_t i = 0; i < types; ++i) {
        const auto& item = sc.items[i];
        if (!positive(item.dims)) r.fail("item ", i, ": dimensions must be positive");
        if (item.count <= 0) r.fail("item ", i, ": empty item type");
        if (item.pick_poses.size() != static_cast<std::size_t>(std::max(item.count, 0))) {
            r.fail("item ", i, ": ", item.pick_poses.size(), " pick poses for count ", item.count);
        }
        for (const auto& p : item.pick_poses) {
            if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.theta)) {
                r.fail("item ", i, ": pick pose is not finite");
            }
        }
        if (sc.boxes_of_type(static_cast<int>(i)).empty()) r.fail("item ", i, ": no box assigned");
    }
    for (std::size_t b = 0; b < sc.boxes.size(); ++b) {
        const auto& box = sc.boxes[b];
        if (!positive(box.dims)) r.fail("box ", b, ": dimensions must be positive");
        if (box.item_type < 0 || static_cast<std::size_t>(box.item_type) >= types) {
            r.fail("box ", b, ": unknown item type ", box.item_type);
            continue;
        }
        if (box.dims.h < sc.items[static_cast<std::size_t>(box.item_type)].dims.h) {
            r.warn("box ", b, ": shorter than its items, layout will be empty");
        }
    }

    check_robot(sc, r);
    check_scaling(sc.scaling, r);
    check_pso(sc, r);

    if (report.ok()) {
        const double reach = kin::reach_radius(sc.robot.chain);
        for (std::size_t i = 0; i < types; ++i) {
            for (std::size_t s = 0; s < sc.items[i].pick_poses.size(); ++s) {
                const auto& p = sc.items[i].pick_poses[s];
                const Eigen::Vector3d point(p.x, p.y, sc.table_z + sc.items[i].dims.h);
                if (distance_to_sweep(sc.robot, point) > reach) {
                    r.fail("item ", i, " #", s, ": pick pose outside the reach of the rail sweep");
                }
            }
        }
    }
    if (sc.sim.sample_dt <= 0.0 || sc.sim.path_step <= 0.0) r.fail("simulation: sampling steps must be positive");
    return report;
}

}  // namespace mmplan
