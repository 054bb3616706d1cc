#pragma once

#include <string>

#include "mmplan/core.hpp"
#include "mmplan/io.hpp"

namespace testing {

inline std::string data_path(const std::string& name) { return std::string(MMPLAN_DATA_DIR) + "/" + name; }

inline mmplan::Scenario demo_cell() { return mmplan::io::load_scenario(data_path("demo_cell/scenario.json")); }

inline mmplan::NormStats demo_stats() { return mmplan::io::load_stats(data_path("demo_cell/stats.json")); }

inline mmplan::JointSpec revolute_z(double x_offset, double lo = -3.14159, double hi = 3.14159) {
    mmplan::JointSpec j;
    j.type = mmplan::JointType::Revolute;
    j.axis = Eigen::Vector3d::UnitZ();
    j.origin.translation() = Eigen::Vector3d(x_offset, 0.0, 0.0);
    j.limits = mmplan::Interval{lo, hi};
    j.v_max = 3.0;
    j.a_max = 20.0;
    return j;
}

/// Planar 2R arm with links l1, l2 along x.
inline mmplan::SerialChain planar_2r(double l1, double l2) {
    mmplan::SerialChain c;
    c.joints = {revolute_z(0.0), revolute_z(l1)};
    c.tool.translation() = Eigen::Vector3d(l2, 0.0, 0.0);
    return c;
}

}  // namespace testing
