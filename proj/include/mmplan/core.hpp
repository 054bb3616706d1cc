#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Geometry>

namespace mmplan {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Wraps an angle into (-pi, pi].
inline double normalize_angle(double a) {
    a = std::remainder(a, 2.0 * std::numbers::pi);
    if (a <= -std::numbers::pi) a += 2.0 * std::numbers::pi;
    return a;
}

/// Planar pose on the work plane: position in meters, heading in radians.
struct Pose2 {
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;

    bool operator==(const Pose2&) const = default;
};

/// Axis-aligned cuboid extents (length along local x, width along local y, height).
struct Dims {
    double l = 0.0;
    double w = 0.0;
    double h = 0.0;

    bool operator==(const Dims&) const = default;
};

/// Position of the rail carriage, one coordinate per base DOF.
using BasePose = std::vector<double>;

struct Interval {
    double min = 0.0;
    double max = 0.0;

    bool operator==(const Interval&) const = default;
    double width() const { return max - min; }
    bool contains(double v) const { return v >= min && v <= max; }
};

// ---------------------------------------------------------------------------
// Items and boxes

struct ItemType {
    std::string name;
    Dims dims;
    int count = 0;                  // number of pick-side items of this type
    std::vector<Pose2> pick_poses;  // one per item, centroid of the footprint
};

struct BoxSpec {
    int item_type = 0;
    Dims dims;  // inner dimensions
    Pose2 pose; // world pose of the box corner (local origin of the packing frame)
};

// ---------------------------------------------------------------------------
// Robot

enum class JointType { Revolute, Prismatic };

struct JointSpec {
    std::string name;
    JointType type = JointType::Revolute;
    Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();
    Eigen::Isometry3d origin = Eigen::Isometry3d::Identity();  // parent -> joint frame at q = 0
    std::optional<Interval> limits;
    double v_max = 1.0;  // rad/s or m/s
    double a_max = 1.0;
};

/// Task-space rows of the geometric Jacobian [vx vy vz wx wy wz].
enum TaskRow : unsigned { RowX = 0, RowY, RowZ, RowRoll, RowPitch, RowYaw };

struct SerialChain {
    std::vector<JointSpec> joints;
    Eigen::Isometry3d tool = Eigen::Isometry3d::Identity();

    std::size_t size() const { return joints.size(); }
};

struct RailBase {
    int dof = 1;
    std::vector<Eigen::Vector3d> axes;  // unit translation axis per DOF
    Eigen::Vector3d mount = Eigen::Vector3d::Zero();
    std::vector<Interval> limits;       // p_lim per DOF
    std::vector<double> footprint_half; // half-extent of the carriage per DOF
    std::vector<std::vector<Interval>> keep_out;  // each zone: one interval per DOF
    double v_max = 0.7;
    double a_max = 0.5;
};

struct RobotModel {
    SerialChain chain;
    RailBase base;
    double v_tcp = 2.0;   // v_R
    double a_tcp = 27.0;  // a_R
    std::vector<double> home;
    std::vector<TaskRow> ik_rows{RowX, RowY, RowZ, RowYaw};
    std::vector<TaskRow> manipulability_rows{RowX, RowY};
};

// ---------------------------------------------------------------------------
// Safety scaling

struct ScalingPolicy {
    // d_s_max[0] may be +inf ("unbounded" in files).
    std::vector<double> d_s_max;
    std::vector<double> d_s_min;

    int levels() const { return static_cast<int>(d_s_max.size()); }
};

// ---------------------------------------------------------------------------
// Optimizer configuration and calibration

struct PsoParams {
    int iterations = 25;  // N_s
    int particles = 10;   // N_p
    std::vector<Interval> p_lim;
    std::vector<Interval> v_lim;
    double w_time = 0.5;
    double w_manip = 0.5;
    double inertia_start = 0.9;
    double inertia_end = 0.4;
    double c_cognitive = 2.0;
    double c_social = 2.0;
    std::uint64_t seed = 1;
};

struct TypeStats {
    double mu_t = 1.0;
    double sigma_t = 1.0;
    double mu_delta = 1.0;
    double sigma_delta = 1.0;

    bool operator==(const TypeStats&) const = default;
};

struct NormStats {
    int n_tests = 0;
    std::vector<TypeStats> types;
    double mu_tvp = 1.0;

    bool operator==(const NormStats&) const = default;
};

// ---------------------------------------------------------------------------
// Digital-model settings not covered by the robot description

struct SimSettings {
    double overfly_height = 0.10;
    double suction_dwell = 0.20;
    double sample_dt = 0.01;     // manipulability sampling period
    double path_step = 0.01;     // spatial resolution for joint-path tracking (m)
    double wall_thickness = 0.005;
    double ik_tolerance = 1e-6;
    int ik_max_iters = 200;
    double ik_damping = 1e-3;
};

struct PackingSettings {
    double margin = 0.001;
};

struct Scenario {
    std::string name;
    double table_z = 0.0;  // work-plane height of pick table and box floors
    std::vector<ItemType> items;
    std::vector<BoxSpec> boxes;
    RobotModel robot;
    ScalingPolicy scaling;
    PsoParams pso;
    SimSettings sim;
    PackingSettings packing;

    int type_count() const { return static_cast<int>(items.size()); }
    /// Indices into `boxes` for a given item type, in declaration order.
    std::vector<int> boxes_of_type(int type) const;
};

// ---------------------------------------------------------------------------
// Result of the planner

enum class TaskPhase { Travel, Wait, PickPlace };

struct RobotTask {
    int type = 0;
    int item = 0;       // index within the type (0-based)
    int box = 0;        // index into Scenario::boxes
    int spot = 0;       // index within the box layout
    Pose2 pick;
    Pose2 place;
    BasePose base;
    int kappa = 0;
    double v_scaled = 0.0;
    double a_scaled = 0.0;
    double travel = 0.0;
    double wait = 0.0;
    double t_pp = 0.0;
    double delta_bar = 0.0;
    double psi_best = kInf;
    double start = 0.0;
    double end = 0.0;
};

struct Plan {
    std::vector<BasePose> x_star;
    std::vector<int> theta_star;
    std::vector<int> kappa_star;
    std::vector<RobotTask> tasks;
    double total_time = 0.0;
    double best_psi = kInf;
    std::uint64_t sim_calls = 0;
};

// ---------------------------------------------------------------------------
// Errors

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

struct ValidationReport {
    std::vector<std::string> violations;
    std::vector<std::string> warnings;

    bool ok() const { return violations.empty(); }
};

/// Checks every invariant of the scenario types plus cross-references.
ValidationReport validate_scenario(const Scenario& scenario);

/// Band index v with d_s_min[v] <= d < d_s_max[v]; +inf maps to band 0.
int scaling_band(const ScalingPolicy& policy, double distance);

}  // namespace mmplan
