#pragma once

#include <atomic>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Geometry>

#include "mmplan/core.hpp"

namespace mmplan::sim {

/// One pick-and-place request: item type (for heights), source and target
/// poses on the work plane, and the speed-scaling level.
struct PnpTask {
    int type = 0;
    Pose2 pick;
    Pose2 place;
    int kappa = 0;
};

struct SegmentTiming {
    std::string primitive;
    double distance = 0.0;        // Cartesian path length of the TCP
    double cartesian_time = 0.0;  // TVP with the scaled TCP limits
    double joint_time = 0.0;      // lower bound from joint speed limits along the path
    double duration = 0.0;        // max of the two, or the dwell time
};

struct TraceSample {
    double t = 0.0;  // from the start of the rollout
    Eigen::Vector3d tcp = Eigen::Vector3d::Zero();
    double yaw = 0.0;
    double inverse_manipulability = 0.0;
    int segment = 0;
};

struct SimResult {
    double t_pp = kInf;
    double delta_bar = kInf;
    double xi_c = 0.0;  // 0 or +inf
    double xi_f = 0.0;  // 0 or +inf
    std::vector<SegmentTiming> segments;
    std::vector<TraceSample> trace;

    bool feasible() const { return xi_c == 0.0 && xi_f == 0.0; }
};

/// One rollout of the digital model. Pure: depends only on its arguments.
/// Throws human::BadKappa when kappa is outside [0, n_k - 2].
SimResult simulate_pnp(const Scenario& scenario, const BasePose& base, const PnpTask& task,
                       bool record_trace = false);

/// World transform of the first chain frame for a rail position.
Eigen::Isometry3d base_transform(const RobotModel& robot, const BasePose& base);

/// True when the carriage footprint intersects a keep-out zone.
bool base_in_keep_out(const RailBase& base, const BasePose& pose);

/// True when the straight TCP segment a-b crosses a wall of any box.
bool segment_hits_walls(const Scenario& scenario, const Eigen::Vector3d& a, const Eigen::Vector3d& b);

/// Evaluator wrapper with an instrumented call counter. Batch evaluation runs
/// particles concurrently (OpenMP) or serially; both produce identical vectors.
class DigitalModel {
public:
    explicit DigitalModel(Scenario scenario) : scenario_(std::move(scenario)) {}

    const Scenario& scenario() const { return scenario_; }

    SimResult simulate(const BasePose& base, const PnpTask& task, bool record_trace = false) const;

    /// Parallel kernel; `jobs` <= 0 uses the OpenMP default.
    std::vector<SimResult> batch_simulate(std::span<const BasePose> particles, const PnpTask& task,
                                          int jobs = 0) const;

    /// Serial reference for batch_simulate.
    std::vector<SimResult> batch_simulate_serial(std::span<const BasePose> particles,
                                                 const PnpTask& task) const;

    std::uint64_t calls() const { return calls_.load(); }
    void reset_calls() { calls_.store(0); }

private:
    Scenario scenario_;
    mutable std::atomic<std::uint64_t> calls_{0};
};

}  // namespace mmplan::sim
