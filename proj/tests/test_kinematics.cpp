#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "mmplan/kinematics.hpp"

using namespace mmplan;

namespace {

// Independent transform-chain oracle built from raw 4x4 matrices.
Eigen::Matrix4d rodrigues(const Eigen::Vector3d& axis, double angle) {
    const Eigen::Vector3d k = axis.normalized();
    Eigen::Matrix3d kx;
    kx << 0, -k.z(), k.y(), k.z(), 0, -k.x(), -k.y(), k.x(), 0;
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    m.topLeftCorner<3, 3>() = Eigen::Matrix3d::Identity() + std::sin(angle) * kx + (1 - std::cos(angle)) * kx * kx;
    return m;
}

Eigen::Matrix4d oracle_fk(const SerialChain& chain, const Eigen::VectorXd& q) {
    Eigen::Matrix4d t = Eigen::Matrix4d::Identity();
    for (std::size_t i = 0; i < chain.size(); ++i) {
        const auto& j = chain.joints[i];
        t = t * j.origin.matrix();
        if (j.type == JointType::Revolute) {
            t = t * rodrigues(j.axis, q[static_cast<Eigen::Index>(i)]);
        } else {
            Eigen::Matrix4d s = Eigen::Matrix4d::Identity();
            s.topRightCorner<3, 1>() = j.axis.normalized() * q[static_cast<Eigen::Index>(i)];
            t = t * s;
        }
    }
    return t * chain.tool.matrix();
}

Eigen::Matrix<double, 6, Eigen::Dynamic> fd_jacobian(const SerialChain& chain, const Eigen::VectorXd& q, double h) {
    Eigen::Matrix<double, 6, Eigen::Dynamic> jac(6, q.size());
    for (Eigen::Index i = 0; i < q.size(); ++i) {
        Eigen::VectorXd qp = q, qm = q;
        qp[i] += h;
        qm[i] -= h;
        const auto tp = kin::forward_kinematics(chain, qp);
        const auto tm = kin::forward_kinematics(chain, qm);
        jac.block<3, 1>(0, i) = (tp.translation() - tm.translation()) / (2 * h);
        const Eigen::AngleAxisd d(tp.linear() * tm.linear().transpose());
        jac.block<3, 1>(3, i) = d.axis() * d.angle() / (2 * h);
    }
    return jac;
}

// Spatial chain with non-trivial origins and mixed joint types.
SerialChain spatial_chain() {
    SerialChain c;
    JointSpec j;
    j.type = JointType::Prismatic;
    j.axis = Eigen::Vector3d(0, 0, 1);
    c.joints.push_back(j);
    j.type = JointType::Revolute;
    j.axis = Eigen::Vector3d(0, 0, 1);
    j.origin.translation() = Eigen::Vector3d(0.1, 0.0, 0.3);
    c.joints.push_back(j);
    j.axis = Eigen::Vector3d(0, 1, 0);
    j.origin = Eigen::Translation3d(0.4, 0.05, 0.0) * Eigen::AngleAxisd(0.3, Eigen::Vector3d::UnitX());
    c.joints.push_back(j);
    j.axis = Eigen::Vector3d(1, 1, 0);
    j.origin = Eigen::Translation3d(0.35, 0.0, 0.1) * Eigen::AngleAxisd(-0.7, Eigen::Vector3d::UnitZ());
    c.joints.push_back(j);
    c.tool = Eigen::Translation3d(0.1, 0.02, -0.05) * Eigen::AngleAxisd(0.2, Eigen::Vector3d::UnitY());
    return c;
}

}  // namespace

TEST_CASE("forward kinematics basics") {
    SUBCASE("zero configuration is the product of fixed transforms") {
        const auto chain = spatial_chain();
        const Eigen::VectorXd q = Eigen::VectorXd::Zero(4);
        Eigen::Isometry3d expect = Eigen::Isometry3d::Identity();
        for (const auto& j : chain.joints) expect = expect * j.origin;
        expect = expect * chain.tool;
        CHECK((kin::forward_kinematics(chain, q).matrix() - expect.matrix()).cwiseAbs().maxCoeff() < 1e-15);
    }
    SUBCASE("quarter turn of a unit link") {
        SerialChain c;
        c.joints = {testing::revolute_z(0.0)};
        c.tool.translation() = Eigen::Vector3d(1, 0, 0);
        const auto t0 = kin::forward_kinematics(c, Eigen::VectorXd::Zero(1));
        CHECK(t0.translation().isApprox(Eigen::Vector3d(1, 0, 0)));
        const auto t = kin::forward_kinematics(c, Eigen::VectorXd::Constant(1, std::numbers::pi / 2));
        CHECK((t.translation() - Eigen::Vector3d(0, 1, 0)).norm() < 1e-15);
    }
    SUBCASE("random configurations match the matrix-product oracle") {
        const auto chain = spatial_chain();
        std::mt19937_64 gen(11);
        std::uniform_real_distribution<double> u(-3.0, 3.0);
        for (int n = 0; n < 200; ++n) {
            Eigen::VectorXd q(4);
            for (int i = 0; i < 4; ++i) q[i] = u(gen);
            const Eigen::Matrix4d diff = kin::forward_kinematics(chain, q).matrix() - oracle_fk(chain, q);
            CHECK(diff.cwiseAbs().maxCoeff() < 1e-12);
        }
    }
    SUBCASE("dimension mismatch") {
        const auto chain = spatial_chain();
        CHECK_THROWS_AS(kin::forward_kinematics(chain, Eigen::VectorXd::Zero(3)), kin::DimensionMismatch);
        CHECK_THROWS_AS(kin::jacobian(chain, Eigen::VectorXd::Zero(5)), kin::DimensionMismatch);
    }
    SUBCASE("root transform composes on the left") {
        const auto chain = spatial_chain();
        const Eigen::Isometry3d root(Eigen::Translation3d(0.5, -0.2, 0.1) * Eigen::AngleAxisd(0.4, Eigen::Vector3d::UnitZ()));
        const Eigen::VectorXd q = Eigen::VectorXd::Constant(4, 0.3);
        const Eigen::Matrix4d diff =
            kin::forward_kinematics(chain, q, root).matrix() - root.matrix() * kin::forward_kinematics(chain, q).matrix();
        CHECK(diff.cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("jacobian agrees with central finite differences") {
    for (const auto& chain : {spatial_chain(), testing::demo_cell().robot.chain}) {
        std::mt19937_64 gen(3);
        std::uniform_real_distribution<double> u(-2.5, 2.5);
        double worst = 0.0;
        for (int n = 0; n < 100; ++n) {
            Eigen::VectorXd q(static_cast<Eigen::Index>(chain.size()));
            for (Eigen::Index i = 0; i < q.size(); ++i) q[i] = u(gen);
            const auto diff = kin::jacobian(chain, q) - fd_jacobian(chain, q, 1e-7);
            worst = std::max(worst, diff.cwiseAbs().maxCoeff());
        }
        CHECK(worst < 1e-6);
    }
}

TEST_CASE("prismatic-only chain has constant unit-axis columns") {
    SerialChain c;
    for (const auto& axis : {Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(0, 2, 0), Eigen::Vector3d(1, 0, 1)}) {
        JointSpec j;
        j.type = JointType::Prismatic;
        j.axis = axis;
        j.origin.translation() = Eigen::Vector3d(0.1, 0.2, 0.3);
        c.joints.push_back(j);
    }
    for (double s : {0.0, 0.4, -1.3}) {
        const auto jac = kin::jacobian(c, Eigen::VectorXd::Constant(3, s));
        CHECK(jac.block<3, 1>(0, 0).isApprox(Eigen::Vector3d(1, 0, 0)));
        CHECK(jac.block<3, 1>(0, 1).isApprox(Eigen::Vector3d(0, 1, 0)));
        CHECK(jac.block<3, 1>(0, 2).isApprox(Eigen::Vector3d(1, 0, 1).normalized()));
        CHECK(jac.bottomRows<3>().isZero());
    }
}

TEST_CASE("inverse manipulability") {
    const std::vector<TaskRow> xy{RowX, RowY};
    SUBCASE("isotropic 2R arm against the hand-computed Jacobian") {
        const auto chain = testing::planar_2r(1.0, 1.0);
        const double q1 = 0.0, q2 = std::numbers::pi / 2;
        Eigen::Matrix2d j;
        j << -std::sin(q1) - std::sin(q1 + q2), -std::sin(q1 + q2), std::cos(q1) + std::cos(q1 + q2), std::cos(q1 + q2);
        const double expect = 1.0 / std::sqrt((j * j.transpose()).determinant());
        Eigen::Vector2d q(q1, q2);
        CHECK(std::abs(kin::inverse_manipulability(chain, q, xy) - expect) < 1e-12);
        CHECK(std::abs(expect - 1.0) < 1e-12);
    }
    SUBCASE("closed form 1/(l1 l2 |sin q2|)") {
        const auto chain = testing::planar_2r(0.44, 0.54);
        for (double q2 : {0.3, 1.0, -2.0, 2.9}) {
            Eigen::Vector2d q(0.7, q2);
            CHECK(kin::inverse_manipulability(chain, q, xy) ==
                  doctest::Approx(1.0 / (0.44 * 0.54 * std::abs(std::sin(q2)))).epsilon(1e-12));
        }
    }
    SUBCASE("scaling link lengths by s scales the index by s^-2") {
        const Eigen::Vector2d q(0.2, 1.1);
        const double base = kin::inverse_manipulability(testing::planar_2r(0.5, 0.3), q, xy);
        for (double s : {0.5, 2.0, 3.0}) {
            const double scaled = kin::inverse_manipulability(testing::planar_2r(0.5 * s, 0.3 * s), q, xy);
            CHECK(scaled == doctest::Approx(base / (s * s)).epsilon(1e-12));
        }
    }
    SUBCASE("stretched arm is singular") {
        const auto chain = testing::planar_2r(1.0, 1.0);
        CHECK(std::isinf(kin::inverse_manipulability(chain, Eigen::Vector2d(0.4, 0.0), xy)));
    }
    SUBCASE("positive at full rank") {
        const auto chain = testing::demo_cell().robot.chain;
        std::mt19937_64 gen(5);
        std::uniform_real_distribution<double> u(-2.5, -0.1);
        for (int n = 0; n < 50; ++n) {
            Eigen::Vector4d q(0.1, u(gen), u(gen), u(gen));
            const double im = kin::inverse_manipulability(chain, q, xy);
            CHECK(im > 0.0);
        }
    }
}

TEST_CASE("inverse kinematics") {
    const auto sc = testing::demo_cell();
    const auto& chain = sc.robot.chain;
    kin::IkOptions options;

    SUBCASE("target equal to the current pose takes zero iterations") {
        const Eigen::Vector4d q0(0.2, 1.0, -1.2, 0.3);
        const auto r = kin::inverse_kinematics(chain, kin::forward_kinematics(chain, q0), q0, options);
        CHECK(r.ok());
        CHECK(r.iterations == 0);
        CHECK(r.q == q0);
    }
    SUBCASE("out of reach fails fast") {
        Eigen::Isometry3d target = Eigen::Isometry3d::Identity();
        target.translation() = Eigen::Vector3d(kin::reach_radius(chain) + 0.5, 0.0, 0.1);
        const auto r = kin::inverse_kinematics(chain, target, Eigen::Vector4d(0.2, 1.0, -1.2, 0.3), options);
        CHECK(r.status == kin::IkStatus::OutOfReach);
        CHECK(r.iterations == 0);
    }
    SUBCASE("round trip from a perturbed seed") {
        std::mt19937_64 gen(17);
        std::normal_distribution<double> noise(0.0, 0.05);
        int ok = 0;
        const int trials = 1000;
        for (int n = 0; n < trials; ++n) {
            Eigen::VectorXd q(4);
            for (std::size_t i = 0; i < 4; ++i) {
                const auto lim = *chain.joints[i].limits;
                std::uniform_real_distribution<double> u(lim.min, lim.max);
                q[static_cast<Eigen::Index>(i)] = u(gen);
            }
            Eigen::VectorXd seed = q;
            for (Eigen::Index i = 0; i < 4; ++i) seed[i] += noise(gen);
            seed = kin::clamp_to_limits(chain, seed);
            const auto target = kin::forward_kinematics(chain, q);
            const auto r = kin::inverse_kinematics(chain, target, seed, options);
            const double err = (kin::forward_kinematics(chain, r.q).translation() - target.translation()).norm();
            ok += (r.ok() && err < 1e-6);
        }
        MESSAGE("IK round trip " << ok << "/" << trials);
        CHECK(ok >= 990);
    }
    SUBCASE("joint limits are respected") {
        const Eigen::Vector4d q0(0.2, 1.0, -1.2, 0.3);
        Eigen::Isometry3d target = kin::forward_kinematics(chain, q0);
        target.translation().z() = 0.8;  // lift range ends at 0.45
        const auto r = kin::inverse_kinematics(chain, target, q0, options);
        CHECK_FALSE(r.ok());
        for (std::size_t i = 0; i < 4; ++i) CHECK(chain.joints[i].limits->contains(r.q[static_cast<Eigen::Index>(i)]));
    }
}
