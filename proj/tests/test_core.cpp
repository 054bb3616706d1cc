#include <doctest.h>

#include <algorithm>
#include <random>

#include "helpers.hpp"

using namespace mmplan;

namespace {

bool has(const std::vector<std::string>& list, const std::string& needle) {
    return std::any_of(list.begin(), list.end(), [&](const auto& s) { return s.find(needle) != std::string::npos; });
}

}  // namespace

TEST_CASE("normalize_angle wraps into (-pi, pi]") {
    const double pi = std::numbers::pi;
    CHECK(normalize_angle(0.0) == 0.0);
    CHECK(normalize_angle(pi) == doctest::Approx(pi));
    CHECK(normalize_angle(-pi) == doctest::Approx(pi));
    CHECK(normalize_angle(3 * pi / 2) == doctest::Approx(-pi / 2));
    CHECK(normalize_angle(-5 * pi / 2) == doctest::Approx(-pi / 2));
}

TEST_CASE("demo cell scenario is valid") {
    const auto sc = testing::demo_cell();
    const auto report = validate_scenario(sc);
    for (const auto& v : report.violations) MESSAGE(v);
    CHECK(report.ok());
    CHECK(sc.type_count() == 2);
    CHECK(sc.items[0].count == 3);
    CHECK(sc.items[1].count == 3);
    CHECK(sc.boxes_of_type(0) == std::vector<int>{0});
    CHECK(sc.boxes_of_type(1) == std::vector<int>{1});
    CHECK(sc.scaling.levels() == 5);
    CHECK(std::isinf(sc.scaling.d_s_max[0]));
}

TEST_CASE("validation catches broken invariants") {
    SUBCASE("empty item type") {
        auto sc = testing::demo_cell();
        sc.items[0].count = 0;
        sc.items[0].pick_poses.clear();
        CHECK(has(validate_scenario(sc).violations, "empty item type"));
    }
    SUBCASE("last band must reach 0") {
        auto sc = testing::demo_cell();
        sc.scaling.d_s_min = {1.5, 1.0, 0.5, 0.2, 0.1};
        CHECK(has(validate_scenario(sc).violations, "last band must reach 0"));
    }
    SUBCASE("non-contiguous bands") {
        auto sc = testing::demo_cell();
        sc.scaling.d_s_min = {1.5, 0.9, 0.5, 0.2, 0.0};
        CHECK_FALSE(validate_scenario(sc).ok());
    }
    SUBCASE("pose count mismatch") {
        auto sc = testing::demo_cell();
        sc.items[1].pick_poses.pop_back();
        CHECK_FALSE(validate_scenario(sc).ok());
    }
    SUBCASE("non-positive dims") {
        auto sc = testing::demo_cell();
        sc.items[0].dims.w = 0.0;
        CHECK_FALSE(validate_scenario(sc).ok());
    }
    SUBCASE("missing box for a type") {
        auto sc = testing::demo_cell();
        sc.boxes.pop_back();
        CHECK_FALSE(validate_scenario(sc).ok());
    }
    SUBCASE("non-positive limits") {
        auto sc = testing::demo_cell();
        sc.robot.v_tcp = 0.0;
        CHECK_FALSE(validate_scenario(sc).ok());
        sc = testing::demo_cell();
        sc.robot.base.a_max = -1.0;
        CHECK_FALSE(validate_scenario(sc).ok());
    }
    SUBCASE("inverted rail limits") {
        auto sc = testing::demo_cell();
        sc.robot.base.limits[0] = {1.0, -1.0};
        CHECK_FALSE(validate_scenario(sc).ok());
    }
    SUBCASE("empty chain") {
        auto sc = testing::demo_cell();
        sc.robot.chain.joints.clear();
        CHECK_FALSE(validate_scenario(sc).ok());
    }
    SUBCASE("asymmetric velocity bounds") {
        auto sc = testing::demo_cell();
        sc.pso.v_lim[0] = {-1.0, 0.5};
        CHECK_FALSE(validate_scenario(sc).ok());
    }
    SUBCASE("unreachable pick pose") {
        auto sc = testing::demo_cell();
        sc.items[0].pick_poses[0].y = 3.0;
        CHECK_FALSE(validate_scenario(sc).ok());
    }
    SUBCASE("weights not summing to one only warn") {
        auto sc = testing::demo_cell();
        sc.pso.w_time = 1.0;
        sc.pso.w_manip = 0.5;
        const auto r = validate_scenario(sc);
        CHECK(r.ok());
        CHECK_FALSE(r.warnings.empty());
    }
}

TEST_CASE("scaling bands partition [0, inf)") {
    const auto policy = testing::demo_cell().scaling;
    CHECK(scaling_band(policy, kInf) == 0);
    CHECK(scaling_band(policy, 1.5) == 0);
    CHECK(scaling_band(policy, 1.4999) == 1);
    CHECK(scaling_band(policy, 1.0) == 1);
    CHECK(scaling_band(policy, 0.63) == 2);
    CHECK(scaling_band(policy, 0.5) == 2);
    CHECK(scaling_band(policy, 0.3) == 3);
    CHECK(scaling_band(policy, 0.1) == 4);
    CHECK(scaling_band(policy, 0.0) == 4);
    CHECK_THROWS_AS(scaling_band(policy, -0.1), Error);

    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    for (int n = 0; n < 1000; ++n) {
        const double d = u(gen);
        int hits = 0;
        for (int v = 0; v < policy.levels(); ++v) {
            hits += (policy.d_s_min[static_cast<std::size_t>(v)] <= d && d < policy.d_s_max[static_cast<std::size_t>(v)]);
        }
        CHECK(hits == 1);
        const int band = scaling_band(policy, d);
        CHECK(policy.d_s_min[static_cast<std::size_t>(band)] <= d);
        CHECK(d < policy.d_s_max[static_cast<std::size_t>(band)]);
    }
}
