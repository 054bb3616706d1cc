#include "mmplan/io.hpp"

#include <fstream>
#include <sstream>

namespace mmplan::io {

namespace {

constexpr const char* kUnbounded = "unbounded";
constexpr const char* kAway = "away";

std::array<double, 3> triple(const json& j) {
    if (!j.is_array() || j.size() != 3) throw ParseError("expected a 3-element array, got " + j.dump());
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Dims parse_dims(const json& j) {
    const auto t = triple(j);
    return {t[0], t[1], t[2]};
}

Pose2 parse_pose2(const json& j) {
    const auto t = triple(j);
    return {t[0], t[1], normalize_angle(t[2])};
}

json pose2_json(const Pose2& p) { return json::array({p.x, p.y, p.theta}); }

Eigen::Vector3d parse_vec3(const json& j) {
    const auto t = triple(j);
    return {t[0], t[1], t[2]};
}

json vec3_json(const Eigen::Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }

Interval parse_interval(const json& j) {
    if (!j.is_array() || j.size() != 2) throw ParseError("expected [min, max], got " + j.dump());
    return {j[0].get<double>(), j[1].get<double>()};
}

json interval_json(const Interval& i) { return json::array({i.min, i.max}); }

std::vector<Interval> parse_intervals(const json& j) {
    std::vector<Interval> out;
    for (const auto& e : j) out.push_back(parse_interval(e));
    return out;
}

json intervals_json(const std::vector<Interval>& v) {
    json out = json::array();
    for (const auto& i : v) out.push_back(interval_json(i));
    return out;
}

Eigen::Isometry3d parse_transform(const json& j) {
    Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
    if (j.contains("xyz")) t.translation() = parse_vec3(j.at("xyz"));
    if (j.contains("rpy")) {
        const auto rpy = parse_vec3(j.at("rpy"));
        t.linear() = (Eigen::AngleAxisd(rpy.z(), Eigen::Vector3d::UnitZ()) *
                      Eigen::AngleAxisd(rpy.y(), Eigen::Vector3d::UnitY()) *
                      Eigen::AngleAxisd(rpy.x(), Eigen::Vector3d::UnitX()))
                         .toRotationMatrix();
    }
    return t;
}

json transform_json(const Eigen::Isometry3d& t) {
    const Eigen::Matrix3d r = t.linear();
    // ZYX Euler angles back to roll/pitch/yaw.
    const double pitch = std::asin(std::clamp(-r(2, 0), -1.0, 1.0));
    const double roll = std::atan2(r(2, 1), r(2, 2));
    const double yaw = std::atan2(r(1, 0), r(0, 0));
    return {{"xyz", vec3_json(t.translation())}, {"rpy", json::array({roll, pitch, yaw})}};
}

const std::array<std::pair<TaskRow, const char*>, 6> kRowNames{{
    {RowX, "x"}, {RowY, "y"}, {RowZ, "z"}, {RowRoll, "roll"}, {RowPitch, "pitch"}, {RowYaw, "yaw"},
}};

std::vector<TaskRow> parse_rows(const json& j) {
    std::vector<TaskRow> out;
    for (const auto& e : j) {
        const auto name = e.get<std::string>();
        const auto it = std::find_if(kRowNames.begin(), kRowNames.end(),
                                     [&](const auto& p) { return name == p.second; });
        if (it == kRowNames.end()) throw ParseError("unknown task row '" + name + "'");
        out.push_back(it->first);
    }
    return out;
}

json rows_json(const std::vector<TaskRow>& rows) {
    json out = json::array();
    for (auto r : rows) out.push_back(kRowNames[r].second);
    return out;
}

double parse_distance(const json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() == kUnbounded) return kInf;
        throw ParseError("unknown distance marker " + j.dump());
    }
    return j.get<double>();
}

json distance_json(double d) { return std::isinf(d) ? json(kUnbounded) : json(d); }

JointSpec parse_joint(const json& j) {
    JointSpec joint;
    joint.name = j.value("name", "");
    const auto type = j.at("type").get<std::string>();
    if (type == "revolute") {
        joint.type = JointType::Revolute;
    } else if (type == "prismatic") {
        joint.type = JointType::Prismatic;
    } else {
        throw ParseError("unknown joint type '" + type + "'");
    }
    joint.axis = parse_vec3(j.at("axis"));
    if (j.contains("origin")) joint.origin = parse_transform(j.at("origin"));
    if (j.contains("limits")) joint.limits = parse_interval(j.at("limits"));
    joint.v_max = j.at("v_max").get<double>();
    joint.a_max = j.at("a_max").get<double>();
    return joint;
}

json joint_json(const JointSpec& joint) {
    json j{{"name", joint.name},
           {"type", joint.type == JointType::Revolute ? "revolute" : "prismatic"},
           {"axis", vec3_json(joint.axis)},
           {"origin", transform_json(joint.origin)}};
    if (joint.limits) j["limits"] = interval_json(*joint.limits);
    j["v_max"] = joint.v_max;
    j["a_max"] = joint.a_max;
    return j;
}

template <typename F>
auto guarded(const char* what, F&& f) {
    try {
        return f();
    } catch (const json::exception& e) {
        throw ParseError(std::string(what) + ": " + e.what());
    }
}

}  // namespace

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------

Scenario parse_scenario(const json& j) {
    return guarded("scenario", [&] {
        Scenario sc;
        sc.name = j.value("name", "");
        sc.table_z = j.value("table_z", 0.0);

        for (const auto& e : j.at("items")) {
            ItemType item;
            item.name = e.value("name", "");
            item.dims = parse_dims(e.at("dims"));
            item.count = e.at("count").get<int>();
            for (const auto& p : e.at("pick_poses")) item.pick_poses.push_back(parse_pose2(p));
            sc.items.push_back(std::move(item));
        }
        for (const auto& e : j.at("boxes")) {
            sc.boxes.push_back({e.at("item_type").get<int>(), parse_dims(e.at("dims")), parse_pose2(e.at("pose"))});
        }

        const auto& r = j.at("robot");
        auto& robot = sc.robot;
        for (const auto& e : r.at("chain")) robot.chain.joints.push_back(parse_joint(e));
        if (r.contains("tool")) robot.chain.tool = parse_transform(r.at("tool"));
        robot.v_tcp = r.at("v_tcp").get<double>();
        robot.a_tcp = r.at("a_tcp").get<double>();
        robot.home = r.at("home").get<std::vector<double>>();
        if (r.contains("ik_rows")) robot.ik_rows = parse_rows(r.at("ik_rows"));
        if (r.contains("manipulability_rows")) robot.manipulability_rows = parse_rows(r.at("manipulability_rows"));

        const auto& b = r.at("base");
        robot.base.dof = b.at("dof").get<int>();
        for (const auto& a : b.at("axes")) robot.base.axes.push_back(parse_vec3(a));
        if (b.contains("mount")) robot.base.mount = parse_vec3(b.at("mount"));
        robot.base.limits = parse_intervals(b.at("limits"));
        robot.base.footprint_half = b.at("footprint_half").get<std::vector<double>>();
        if (b.contains("keep_out")) {
            for (const auto& zone : b.at("keep_out")) robot.base.keep_out.push_back(parse_intervals(zone));
        }
        robot.base.v_max = b.at("v_max").get<double>();
        robot.base.a_max = b.at("a_max").get<double>();

        const auto& s = j.at("scaling");
        for (const auto& d : s.at("d_s_max")) sc.scaling.d_s_max.push_back(parse_distance(d));
        for (const auto& d : s.at("d_s_min")) sc.scaling.d_s_min.push_back(parse_distance(d));

        const auto& p = j.at("pso");
        sc.pso.iterations = p.at("iterations").get<int>();
        sc.pso.particles = p.at("particles").get<int>();
        sc.pso.p_lim = parse_intervals(p.at("p_lim"));
        sc.pso.v_lim = parse_intervals(p.at("v_lim"));
        const auto w = p.at("weights").get<std::vector<double>>();
        if (w.size() != 2) throw ParseError("pso.weights must be [w_t, w_delta]");
        sc.pso.w_time = w[0];
        sc.pso.w_manip = w[1];
        sc.pso.inertia_start = p.at("inertia_start").get<double>();
        sc.pso.inertia_end = p.at("inertia_end").get<double>();
        sc.pso.c_cognitive = p.at("c_cognitive").get<double>();
        sc.pso.c_social = p.at("c_social").get<double>();
        sc.pso.seed = p.value("seed", std::uint64_t{1});

        if (j.contains("simulation")) {
            const auto& m = j.at("simulation");
            sc.sim.overfly_height = m.value("overfly_height", sc.sim.overfly_height);
            sc.sim.suction_dwell = m.value("suction_dwell", sc.sim.suction_dwell);
            sc.sim.sample_dt = m.value("sample_dt", sc.sim.sample_dt);
            sc.sim.path_step = m.value("path_step", sc.sim.path_step);
            sc.sim.wall_thickness = m.value("wall_thickness", sc.sim.wall_thickness);
            sc.sim.ik_tolerance = m.value("ik_tolerance", sc.sim.ik_tolerance);
            sc.sim.ik_max_iters = m.value("ik_max_iters", sc.sim.ik_max_iters);
            sc.sim.ik_damping = m.value("ik_damping", sc.sim.ik_damping);
        }
        if (j.contains("packing")) sc.packing.margin = j.at("packing").value("margin", sc.packing.margin);
        return sc;
    });
}

json to_json(const Scenario& sc) {
    json items = json::array();
    for (const auto& item : sc.items) {
        json poses = json::array();
        for (const auto& p : item.pick_poses) poses.push_back(pose2_json(p));
        items.push_back({{"name", item.name},
                         {"dims", json::array({item.dims.l, item.dims.w, item.dims.h})},
                         {"count", item.count},
                         {"pick_poses", poses}});
    }
    json boxes = json::array();
    for (const auto& box : sc.boxes) {
        boxes.push_back({{"item_type", box.item_type},
                         {"dims", json::array({box.dims.l, box.dims.w, box.dims.h})},
                         {"pose", pose2_json(box.pose)}});
    }

    const auto& robot = sc.robot;
    json chain = json::array();
    for (const auto& joint : robot.chain.joints) chain.push_back(joint_json(joint));
    json axes = json::array();
    for (const auto& a : robot.base.axes) axes.push_back(vec3_json(a));
    json keep_out = json::array();
    for (const auto& zone : robot.base.keep_out) keep_out.push_back(intervals_json(zone));

    json d_max = json::array();
    json d_min = json::array();
    for (double d : sc.scaling.d_s_max) d_max.push_back(distance_json(d));
    for (double d : sc.scaling.d_s_min) d_min.push_back(distance_json(d));

    return {
        {"name", sc.name},
        {"table_z", sc.table_z},
        {"items", items},
        {"boxes", boxes},
        {"robot",
         {{"base",
           {{"dof", robot.base.dof},
            {"axes", axes},
            {"mount", vec3_json(robot.base.mount)},
            {"limits", intervals_json(robot.base.limits)},
            {"footprint_half", robot.base.footprint_half},
            {"keep_out", keep_out},
            {"v_max", robot.base.v_max},
            {"a_max", robot.base.a_max}}},
          {"chain", chain},
          {"tool", transform_json(robot.chain.tool)},
          {"v_tcp", robot.v_tcp},
          {"a_tcp", robot.a_tcp},
          {"home", robot.home},
          {"ik_rows", rows_json(robot.ik_rows)},
          {"manipulability_rows", rows_json(robot.manipulability_rows)}}},
        {"scaling", {{"d_s_max", d_max}, {"d_s_min", d_min}}},
        {"pso",
         {{"iterations", sc.pso.iterations},
          {"particles", sc.pso.particles},
          {"p_lim", intervals_json(sc.pso.p_lim)},
          {"v_lim", intervals_json(sc.pso.v_lim)},
          {"weights", json::array({sc.pso.w_time, sc.pso.w_manip})},
          {"inertia_start", sc.pso.inertia_start},
          {"inertia_end", sc.pso.inertia_end},
          {"c_cognitive", sc.pso.c_cognitive},
          {"c_social", sc.pso.c_social},
          {"seed", sc.pso.seed}}},
        {"simulation",
         {{"overfly_height", sc.sim.overfly_height},
          {"suction_dwell", sc.sim.suction_dwell},
          {"sample_dt", sc.sim.sample_dt},
          {"path_step", sc.sim.path_step},
          {"wall_thickness", sc.sim.wall_thickness},
          {"ik_tolerance", sc.sim.ik_tolerance},
          {"ik_max_iters", sc.sim.ik_max_iters},
          {"ik_damping", sc.sim.ik_damping}}},
        {"packing", {{"margin", sc.packing.margin}}},
    };
}

Scenario load_scenario(const std::filesystem::path& path) { return parse_scenario(read_json(path)); }

// ---------------------------------------------------------------------------

human::HumanSchedule parse_schedule(const json& j) {
    return guarded("schedule", [&] {
        human::HumanSchedule schedule;
        for (const auto& e : j.at("tasks")) {
            human::HumanTask task;
            task.kind = e.at("kind").get<std::string>();
            task.station = e.value("station", "");
            task.start = e.at("start").get<double>();
            const auto& p = e.at("position");
            if (p.is_string()) {
                if (p.get<std::string>() != kAway) throw ParseError("unknown position marker " + p.dump());
            } else {
                task.position = parse_vec3(p);
            }
            schedule.tasks.push_back(std::move(task));
        }
        return schedule;
    });
}

json to_json(const human::HumanSchedule& schedule) {
    json tasks = json::array();
    for (const auto& t : schedule.tasks) {
        tasks.push_back({{"kind", t.kind},
                         {"station", t.station},
                         {"start", t.start},
                         {"position", t.position ? vec3_json(*t.position) : json(kAway)}});
    }
    return {{"tasks", tasks}};
}

human::HumanSchedule load_schedule(const std::filesystem::path& path) { return parse_schedule(read_json(path)); }

// ---------------------------------------------------------------------------

NormStats parse_stats(const json& j) {
    return guarded("stats", [&] {
        NormStats s;
        s.n_tests = j.at("n_tests").get<int>();
        s.mu_tvp = j.at("mu_tvp").get<double>();
        for (const auto& e : j.at("types")) {
            s.types.push_back({e.at("mu_t").get<double>(), e.at("sigma_t").get<double>(),
                               e.at("mu_delta").get<double>(), e.at("sigma_delta").get<double>()});
        }
        return s;
    });
}

json to_json(const NormStats& s) {
    json types = json::array();
    for (const auto& t : s.types) {
        types.push_back({{"mu_t", t.mu_t}, {"sigma_t", t.sigma_t}, {"mu_delta", t.mu_delta}, {"sigma_delta", t.sigma_delta}});
    }
    return {{"n_tests", s.n_tests}, {"mu_tvp", s.mu_tvp}, {"types", types}};
}

NormStats load_stats(const std::filesystem::path& path) { return parse_stats(read_json(path)); }

// ---------------------------------------------------------------------------

json layout_to_json(const packing::PlacementLayout& layout, const Scenario& sc) {
    json boxes = json::array();
    for (std::size_t b = 0; b < sc.boxes.size(); ++b) {
        json spots = json::array();
        for (const auto& s : layout.spots[b]) spots.push_back(pose2_json(s));
        boxes.push_back({{"box", b}, {"item_type", sc.boxes[b].item_type}, {"alpha", layout.alpha[b]}, {"spots", spots}});
    }
    return {{"alpha", layout.alpha_by_type(sc.boxes, sc.type_count())},
            {"boxes", boxes},
            {"warnings", layout.warnings}};
}

// ---------------------------------------------------------------------------

Plan parse_plan(const json& j) {
    return guarded("plan", [&] {
        Plan plan;
        plan.total_time = j.at("total_time").get<double>();
        plan.best_psi = j.at("best_psi").is_null() ? kInf : j.at("best_psi").get<double>();
        plan.sim_calls = j.at("sim_calls").get<std::uint64_t>();
        for (const auto& e : j.at("tasks")) {
            RobotTask t;
            t.type = e.at("type").get<int>();
            t.item = e.at("item").get<int>();
            t.box = e.at("box").get<int>();
            t.spot = e.at("spot").get<int>();
            t.pick = parse_pose2(e.at("pick"));
            t.place = parse_pose2(e.at("place"));
            t.base = e.at("base").get<BasePose>();
            t.kappa = e.at("kappa").get<int>();
            t.v_scaled = e.at("v").get<double>();
            t.a_scaled = e.at("a").get<double>();
            t.travel = e.at("travel").get<double>();
            t.wait = e.at("wait").get<double>();
            t.t_pp = e.at("t_pp").get<double>();
            t.delta_bar = e.at("delta_bar").get<double>();
            t.psi_best = e.at("psi").get<double>();
            t.start = e.at("start").get<double>();
            t.end = e.at("end").get<double>();
            plan.x_star.push_back(t.base);
            plan.theta_star.push_back(t.item);
            plan.kappa_star.push_back(t.kappa);
            plan.tasks.push_back(std::move(t));
        }
        return plan;
    });
}

json to_json(const Plan& plan) {
    json tasks = json::array();
    for (const auto& t : plan.tasks) {
        tasks.push_back({{"name", "P&P_" + std::to_string(t.type) + "," + std::to_string(t.item)},
                         {"type", t.type},
                         {"item", t.item},
                         {"box", t.box},
                         {"spot", t.spot},
                         {"pick", pose2_json(t.pick)},
                         {"place", pose2_json(t.place)},
                         {"base", t.base},
                         {"kappa", t.kappa},
                         {"v", t.v_scaled},
                         {"a", t.a_scaled},
                         {"travel", t.travel},
                         {"wait", t.wait},
                         {"t_pp", t.t_pp},
                         {"delta_bar", t.delta_bar},
                         {"psi", t.psi_best},
                         {"start", t.start},
                         {"end", t.end},
                         {"primitives", json::array({"MoveBase", "MoveTo", "Overfly", "SuctionOn", "Overfly",
                                                     "MoveTo", "SuctionOff", "Overfly"})}});
    }
    return {{"x_star", plan.x_star},
            {"theta_star", plan.theta_star},
            {"kappa_star", plan.kappa_star},
            {"total_time", plan.total_time},
            {"best_psi", std::isinf(plan.best_psi) ? json(nullptr) : json(plan.best_psi)},
            {"sim_calls", plan.sim_calls},
            {"tasks", tasks}};
}

Plan load_plan(const std::filesystem::path& path) { return parse_plan(read_json(path)); }

}  // namespace mmplan::io
