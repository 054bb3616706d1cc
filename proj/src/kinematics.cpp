#include "mmplan/kinematics.hpp"

#include <algorithm>
#include <string>

namespace mmplan::kin {

namespace {

void check_size(const SerialChain& chain, const JointConfig& q) {
    if (static_cast<std::size_t>(q.size()) != chain.size()) {
        throw DimensionMismatch("joint vector has " + std::to_string(q.size()) +
                                " entries, chain has " + std::to_string(chain.size()) + " joints");
    }
}

Pose6D joint_motion(const JointSpec& joint, double value) {
    Pose6D m = Pose6D::Identity();
    if (joint.type == JointType::Revolute) {
        m.linear() = Eigen::AngleAxisd(value, joint.axis.normalized()).toRotationMatrix();
    } else {
        m.translation() = value * joint.axis.normalized();
    }
    return m;
}

}  // namespace

Pose6D forward_kinematics(const SerialChain& chain, const JointConfig& q, const Pose6D& root) {
    check_size(chain, q);
    Pose6D t = root;
    for (std::size_t i = 0; i < chain.size(); ++i) {
        t = t * chain.joints[i].origin * joint_motion(chain.joints[i], q[static_cast<Eigen::Index>(i)]);
    }
    return t * chain.tool;
}

Jacobian jacobian(const SerialChain& chain, const JointConfig& q, const Pose6D& root) {
    check_size(chain, q);
    const auto n = static_cast<Eigen::Index>(chain.size());
    std::vector<Eigen::Vector3d> axes(chain.size());
    std::vector<Eigen::Vector3d> origins(chain.size());

    Pose6D t = root;
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& joint = chain.joints[static_cast<std::size_t>(i)];
        t = t * joint.origin;
        axes[static_cast<std::size_t>(i)] = t.linear() * joint.axis.normalized();
        origins[static_cast<std::size_t>(i)] = t.translation();
        t = t * joint_motion(joint, q[i]);
    }
    const Eigen::Vector3d tcp = (t * chain.tool).translation();

    Jacobian jac(6, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        if (chain.joints[k].type == JointType::Revolute) {
            jac.block<3, 1>(0, i) = axes[k].cross(tcp - origins[k]);
            jac.block<3, 1>(3, i) = axes[k];
        } else {
            jac.block<3, 1>(0, i) = axes[k];
            jac.block<3, 1>(3, i).setZero();
        }
    }
    return jac;
}

double reach_radius(const SerialChain& chain) {
    double r = chain.tool.translation().norm();
    for (std::size_t i = 0; i < chain.size(); ++i) {
        const auto& joint = chain.joints[i];
        if (i > 0) r += joint.origin.translation().norm();
        if (joint.type == JointType::Prismatic) {
            r += joint.limits ? std::max(std::abs(joint.limits->min), std::abs(joint.limits->max))
                              : kInf;
        }
    }
    return r;
}

Eigen::Matrix<double, 6, 1> pose_error(const Pose6D& target, const Pose6D& current) {
    Eigen::Matrix<double, 6, 1> e;
    e.head<3>() = target.translation() - current.translation();
    const Eigen::AngleAxisd rot(target.linear() * current.linear().transpose());
    e.tail<3>() = rot.angle() * rot.axis();
    return e;
}

JointConfig clamp_to_limits(const SerialChain& chain, JointConfig q) {
    for (std::size_t i = 0; i < chain.size(); ++i) {
        if (const auto& lim = chain.joints[i].limits) {
            auto& v = q[static_cast<Eigen::Index>(i)];
            v = std::clamp(v, lim->min, lim->max);
        }
    }
    return q;
}

IkResult inverse_kinematics(const SerialChain& chain, const Pose6D& target, const JointConfig& q0,
                            const IkOptions& options, const Pose6D& root) {
    check_size(chain, q0);
    if (!(options.tolerance > 0.0)) throw Error("IK tolerance must be positive");

    IkResult result;
    result.q = q0;

    const Eigen::Vector3d first_origin = (root * chain.joints.front().origin).translation();
    if ((target.translation() - first_origin).norm() > reach_radius(chain)) {
        result.status = IkStatus::OutOfReach;
        return result;
    }

    const auto m = static_cast<Eigen::Index>(options.rows.size());
    const Eigen::MatrixXd damping =
        options.damping * options.damping * Eigen::MatrixXd::Identity(m, m);
    Eigen::VectorXd err(m);

    for (int iter = 0;; ++iter) {
        const Pose6D current = forward_kinematics(chain, result.q, root);
        const auto full = pose_error(target, current);
        for (Eigen::Index r = 0; r < m; ++r) err[r] = full[options.rows[static_cast<std::size_t>(r)]];
        result.error = err.norm();
        result.iterations = iter;
        if (result.error < options.tolerance) {
            result.status = IkStatus::Converged;
            return result;
        }
        if (iter == options.max_iters) break;

        const Jacobian full_jac = jacobian(chain, result.q, root);
        Eigen::MatrixXd jac(m, full_jac.cols());
        for (Eigen::Index r = 0; r < m; ++r) jac.row(r) = full_jac.row(options.rows[static_cast<std::size_t>(r)]);

        const Eigen::MatrixXd jjt = jac * jac.transpose() + damping;
        const Eigen::VectorXd step = jac.transpose() * jjt.ldlt().solve(err);
        result.q = clamp_to_limits(chain, result.q + step);
    }
    result.status = IkStatus::DidNotConverge;
    return result;
}

double inverse_manipulability(const SerialChain& chain, const JointConfig& q,
                              std::span<const TaskRow> rows) {
    const Jacobian full = jacobian(chain, q);
    const auto m = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd jac(m, full.cols());
    for (Eigen::Index r = 0; r < m; ++r) jac.row(r) = full.row(rows[static_cast<std::size_t>(r)]);
    const double det = (jac * jac.transpose()).determinant();
    if (!(det > kSingularDet)) return kInf;
    return 1.0 / std::sqrt(det);
}

}  // namespace mmplan::kin
