#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mmplan/core.hpp"

namespace mmplan::kin {

using JointConfig = Eigen::VectorXd;
using Pose6D = Eigen::Isometry3d;
using Jacobian = Eigen::Matrix<double, 6, Eigen::Dynamic>;

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// TCP pose in the chain's root frame. `root` places the chain in the world.
Pose6D forward_kinematics(const SerialChain& chain, const JointConfig& q,
                          const Pose6D& root = Pose6D::Identity());

/// Geometric Jacobian, rows [v; w], one column per joint.
Jacobian jacobian(const SerialChain& chain, const JointConfig& q,
                  const Pose6D& root = Pose6D::Identity());

/// Upper bound on the distance from the first joint origin to the TCP.
double reach_radius(const SerialChain& chain);

/// 6-vector [position error; rotation error as angle-axis], target minus current.
Eigen::Matrix<double, 6, 1> pose_error(const Pose6D& target, const Pose6D& current);

enum class IkStatus { Converged, DidNotConverge, OutOfReach };

struct IkOptions {
    double tolerance = 1e-6;
    int max_iters = 200;
    double damping = 1e-3;
    std::vector<TaskRow> rows{RowX, RowY, RowZ, RowYaw};
};

struct IkResult {
    JointConfig q;
    IkStatus status = IkStatus::DidNotConverge;
    int iterations = 0;
    double error = kInf;

    bool ok() const { return status == IkStatus::Converged; }
};

/// Damped least squares from q0 over the selected task rows; joint limits are
/// enforced by clamping after each step.
IkResult inverse_kinematics(const SerialChain& chain, const Pose6D& target,
                            const JointConfig& q0, const IkOptions& options,
                            const Pose6D& root = Pose6D::Identity());

inline constexpr double kSingularDet = 1e-12;

/// 1/sqrt(det(J J^T)) over the selected rows, or +inf when det <= 1e-12.
double inverse_manipulability(const SerialChain& chain, const JointConfig& q,
                              std::span<const TaskRow> rows);

JointConfig clamp_to_limits(const SerialChain& chain, JointConfig q);

}  // namespace mmplan::kin
