#include "mmplan/simulator.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "mmplan/human.hpp"
#include "mmplan/kinematics.hpp"
#include "mmplan/motion.hpp"

namespace mmplan::sim {

namespace {

struct Waypoint {
    Eigen::Vector3d p;
    double yaw = 0.0;
};

Eigen::Isometry3d tcp_target(const Waypoint& w) {
    Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
    t.translation() = w.p;
    t.linear() = Eigen::AngleAxisd(w.yaw, Eigen::Vector3d::UnitZ()).toRotationMatrix();
    return t;
}

Waypoint lerp(const Waypoint& a, const Waypoint& b, double u) {
    return {a.p + u * (b.p - a.p), a.yaw + u * normalize_angle(b.yaw - a.yaw)};
}

bool segment_hits_aabb(const Eigen::Vector3d& a, const Eigen::Vector3d& b, const Eigen::Vector3d& lo,
                       const Eigen::Vector3d& hi) {
    double t0 = 0.0;
    double t1 = 1.0;
    const Eigen::Vector3d d = b - a;
    for (int k = 0; k < 3; ++k) {
        if (std::abs(d[k]) < 1e-15) {
            if (a[k] <= lo[k] || a[k] >= hi[k]) return false;
            continue;
        }
        double ta = (lo[k] - a[k]) / d[k];
        double tb = (hi[k] - a[k]) / d[k];
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
        if (t0 >= t1) return false;
    }
    return true;
}

SimResult infeasible(double xi_c, double xi_f) {
    SimResult r;
    r.xi_c = xi_c;
    r.xi_f = xi_f;
    return r;
}

}  // namespace

Eigen::Isometry3d base_transform(const RobotModel& robot, const BasePose& base) {
    Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
    Eigen::Vector3d offset = robot.base.mount;
    for (std::size_t d = 0; d < base.size(); ++d) offset += base[d] * robot.base.axes[d].normalized();
    t.translation() = offset;
    return t;
}

bool base_in_keep_out(const RailBase& base, const BasePose& pose) {
    for (const auto& zone : base.keep_out) {
        bool inside = true;
        for (std::size_t d = 0; d < zone.size() && inside; ++d) {
            const double lo = pose[d] - base.footprint_half[d];
            const double hi = pose[d] + base.footprint_half[d];
            inside = hi > zone[d].min && lo < zone[d].max;
        }
        if (inside) return true;
    }
    return false;
}

bool segment_hits_walls(const Scenario& scenario, const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
    const double t = scenario.sim.wall_thickness;
    for (const auto& box : scenario.boxes) {
        const double c = std::cos(box.pose.theta);
        const double s = std::sin(box.pose.theta);
        auto local = [&](const Eigen::Vector3d& p) {
            const double dx = p.x() - box.pose.x;
            const double dy = p.y() - box.pose.y;
            return Eigen::Vector3d(c * dx + s * dy, -s * dx + c * dy, p.z() - scenario.table_z);
        };
        const Eigen::Vector3d la = local(a);
        const Eigen::Vector3d lb = local(b);
        const double l = box.dims.l;
        const double w = box.dims.w;
        const double h = box.dims.h;
        const std::array<std::pair<Eigen::Vector3d, Eigen::Vector3d>, 4> walls{{
            {{-t, -t, 0.0}, {0.0, w + t, h}},
            {{l, -t, 0.0}, {l + t, w + t, h}},
            {{0.0, -t, 0.0}, {l, 0.0, h}},
            {{0.0, w, 0.0}, {l, w + t, h}},
        }};
        for (const auto& [lo, hi] : walls) {
            if (segment_hits_aabb(la, lb, lo, hi)) return true;
        }
    }
    return false;
}

SimResult simulate_pnp(const Scenario& sc, const BasePose& base, const PnpTask& task, bool record_trace) {
    const auto& robot = sc.robot;
    const int n_k = sc.scaling.levels();
    if (task.kappa < 0 || task.kappa >= n_k - 1) {
        throw human::BadKappa("simulate_pnp needs 0 <= kappa < n_k - 1, got " + std::to_string(task.kappa));
    }
    if (base.size() != static_cast<std::size_t>(robot.base.dof)) throw Error("base pose has wrong dimension");
    for (std::size_t d = 0; d < base.size(); ++d) {
        if (!robot.base.limits[d].contains(base[d])) return infeasible(0.0, kInf);
    }
    if (base_in_keep_out(robot.base, base)) return infeasible(kInf, 0.0);

    const auto limits = human::scale_params(robot.v_tcp, robot.a_tcp, task.kappa, n_k);
    const Eigen::Isometry3d root = base_transform(robot, base);
    const auto& chain = robot.chain;

    kin::IkOptions ik;
    ik.tolerance = sc.sim.ik_tolerance;
    ik.max_iters = sc.sim.ik_max_iters;
    ik.damping = sc.sim.ik_damping;
    ik.rows = robot.ik_rows;

    kin::JointConfig q = Eigen::Map<const Eigen::VectorXd>(robot.home.data(),
                                                           static_cast<Eigen::Index>(robot.home.size()));
    const Eigen::Isometry3d home = kin::forward_kinematics(chain, q, root);
    const Waypoint start{home.translation(), std::atan2(home.linear()(1, 0), home.linear()(0, 0))};

    const double z = sc.table_z + sc.items[static_cast<std::size_t>(task.type)].dims.h;
    const double hover = z + sc.sim.overfly_height;
    const Waypoint pick{{task.pick.x, task.pick.y, z}, task.pick.theta};
    const Waypoint pick_over{{task.pick.x, task.pick.y, hover}, task.pick.theta};
    const Waypoint place{{task.place.x, task.place.y, z}, task.place.theta};
    const Waypoint place_over{{task.place.x, task.place.y, hover}, task.place.theta};

    struct Step {
        const char* primitive;
        Waypoint from;
        Waypoint to;
        bool dwell;
    };
    const std::array<Step, 8> steps{{
        {"MoveTo(overfly-pick)", start, pick_over, false},
        {"MoveTo(pick)", pick_over, pick, false},
        {"SuctionOn", pick, pick, true},
        {"MoveTo(overfly-pick)", pick, pick_over, false},
        {"MoveTo(overfly-place)", pick_over, place_over, false},
        {"MoveTo(place)", place_over, place, false},
        {"SuctionOff", place, place, true},
        {"MoveTo(overfly-place)", place, place_over, false},
    }};

    SimResult result;
    result.t_pp = 0.0;
    double delta_sum = 0.0;
    std::size_t delta_count = 0;
    bool singular = false;

    for (std::size_t k = 0; k < steps.size(); ++k) {
        const auto& step = steps[k];
        SegmentTiming timing;
        timing.primitive = step.primitive;
        if (step.dwell) {
            timing.duration = sc.sim.suction_dwell;
            result.t_pp += timing.duration;
            result.segments.push_back(std::move(timing));
            continue;
        }
        if (segment_hits_walls(sc, step.from.p, step.to.p)) return infeasible(kInf, 0.0);

        const double distance = (step.to.p - step.from.p).norm();
        const double turn = std::abs(normalize_angle(step.to.yaw - step.from.yaw));
        const int n = std::max(1, static_cast<int>(std::ceil(
                                      std::max(distance / sc.sim.path_step, turn / 0.05))));

        // Track the straight path in joint space.
        std::vector<kin::JointConfig> path;
        path.reserve(static_cast<std::size_t>(n) + 1);
        Eigen::VectorXd variation = Eigen::VectorXd::Zero(q.size());
        for (int i = 0; i <= n; ++i) {
            const double u = static_cast<double>(i) / n;
            const auto sol = kin::inverse_kinematics(chain, tcp_target(lerp(step.from, step.to, u)), q, ik, root);
            if (!sol.ok()) return infeasible(0.0, kInf);
            if (i > 0) variation += (sol.q - q).cwiseAbs();
            q = sol.q;
            path.push_back(q);
        }

        timing.distance = distance;
        timing.cartesian_time = motion::tvp_duration(distance, limits.v, limits.a);
        for (std::size_t j = 0; j < chain.size(); ++j) {
            const auto& joint = chain.joints[j];
            timing.joint_time = std::max(
                timing.joint_time,
                motion::tvp_duration(variation[static_cast<Eigen::Index>(j)], joint.v_max, joint.a_max));
        }
        timing.duration = std::max(timing.cartesian_time, timing.joint_time);

        // Manipulability every sample_dt along the (uniformly time-stretched) profile.
        const double stretch = timing.duration > 0.0 ? timing.cartesian_time / timing.duration : 0.0;
        for (double t = 0.0; t < timing.duration; t += sc.sim.sample_dt) {
            double u = 0.0;
            if (distance > 0.0) {
                u = motion::tvp_sample(distance, limits.v, limits.a, std::min(t * stretch, timing.cartesian_time))
                        .position / distance;
            } else {
                u = t / timing.duration;
            }
            const double x = std::clamp(u, 0.0, 1.0) * n;
            const int i0 = std::min(static_cast<int>(x), n - 1);
            const double f = x - i0;
            const kin::JointConfig qs = (1.0 - f) * path[static_cast<std::size_t>(i0)] +
                                        f * path[static_cast<std::size_t>(i0) + 1];
            const double im = kin::inverse_manipulability(chain, qs, robot.manipulability_rows);
            if (std::isinf(im)) singular = true;
            delta_sum += im;
            ++delta_count;
            if (record_trace) {
                const auto w = lerp(step.from, step.to, std::clamp(u, 0.0, 1.0));
                result.trace.push_back({result.t_pp + t, w.p, normalize_angle(w.yaw), im, static_cast<int>(k)});
            }
        }
        result.t_pp += timing.duration;
        result.segments.push_back(std::move(timing));
    }

    if (delta_count == 0) {
        delta_sum = kin::inverse_manipulability(chain, q, robot.manipulability_rows);
        delta_count = 1;
    }
    result.delta_bar = singular ? kInf : delta_sum / static_cast<double>(delta_count);
    return result;
}

SimResult DigitalModel::simulate(const BasePose& base, const PnpTask& task, bool record_trace) const {
    calls_.fetch_add(1, std::memory_order_relaxed);
    return simulate_pnp(scenario_, base, task, record_trace);
}

std::vector<SimResult> DigitalModel::batch_simulate(std::span<const BasePose> particles,
                                                    const PnpTask& task, int jobs) const {
    std::vector<SimResult> out(particles.size());
    const auto n = static_cast<long>(particles.size());
#ifdef _OPENMP
    const int threads = jobs > 0 ? jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
#else
    (void)jobs;
#endif
    for (long p = 0; p < n; ++p) {
        out[static_cast<std::size_t>(p)] = simulate(particles[static_cast<std::size_t>(p)], task);
    }
    return out;
}

std::vector<SimResult> DigitalModel::batch_simulate_serial(std::span<const BasePose> particles,
                                                           const PnpTask& task) const {
    std::vector<SimResult> out;
    out.reserve(particles.size());
    for (const auto& p : particles) out.push_back(simulate(p, task));
    return out;
}

}  // namespace mmplan::sim
