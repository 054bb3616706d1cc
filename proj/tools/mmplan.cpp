// mmplan: command-line front end for layout, calibration, planning and replay.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mmplan/io.hpp"
#include "mmplan/optimizer.hpp"
#include "mmplan/packing.hpp"
#include "mmplan/planner.hpp"
#include "mmplan/report.hpp"
#include "mmplan/simulator.hpp"

namespace fs = std::filesystem;
using namespace mmplan;
using io::json;

namespace {

enum Exit { kOk = 0, kIo = 1, kInfeasible = 2, kOptimizer = 3 };

class InputError : public Error {
public:
    using Error::Error;
};

struct Common {
    std::string scenario;
    std::string out;
    int jobs = 0;
};

struct PlanArgs {
    std::string schedule;
    std::string stats;
    std::optional<std::uint64_t> seed;
    std::vector<double> weights;
    std::string human;
};

fs::path out_dir(const Common& c) {
    if (!c.out.empty()) return c.out;
    if (const char* env = std::getenv("MMPLAN_OUT"); env && *env) return env;
    return "mmplan_out";
}

Scenario load_valid_scenario(const std::string& path) {
    auto sc = io::load_scenario(path);
    const auto report = validate_scenario(sc);
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
    if (!report.ok()) {
        std::ostringstream os;
        os << "invalid scenario " << path << ':';
        for (const auto& v : report.violations) os << "\n  " << v;
        throw InputError(os.str());
    }
    return sc;
}

void write_manifest(const fs::path& dir, const std::string& command, json config, double wall_seconds,
                    json extra = json::object()) {
    json m{{"command", command}, {"config", std::move(config)}, {"wall_time_s", wall_seconds}};
    for (auto& [k, v] : extra.items()) m[k] = v;
    io::write_text(dir / "manifest.json", io::dump(m));
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int cmd_layout(const Common& c) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto sc = load_valid_scenario(c.scenario);
    const auto layout = packing::compute_layout(sc.items, sc.boxes, sc.packing.margin);
    for (const auto& w : layout.warnings) std::cerr << "warning: " << w << '\n';
    const auto dir = out_dir(c);
    io::write_text(dir / "layout.json", io::dump(io::layout_to_json(layout, sc)));
    io::write_text(dir / "layout.svg", report::layout_svg(sc, layout));
    write_manifest(dir, "layout", {{"scenario", c.scenario}, {"margin", sc.packing.margin}}, seconds_since(t0));
    std::cout << "alpha " << json(layout.alpha_by_type(sc.boxes, sc.type_count())).dump() << '\n';
    return kOk;
}

int cmd_calibrate(const Common& c, int n_tests, int travel_samples, std::uint64_t seed) {
    const auto t0 = std::chrono::steady_clock::now();
    auto sc = load_valid_scenario(c.scenario);
    const auto layout = packing::compute_layout(sc.items, sc.boxes, sc.packing.margin);
    const sim::DigitalModel model(std::move(sc));
    const opt::CalibrationOptions options{n_tests, travel_samples, seed, c.jobs};
    const auto report = opt::calibrate(model, layout, options);
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
    const auto dir = out_dir(c);
    io::write_text(dir / "stats.json", io::dump(io::to_json(report.stats)));
    write_manifest(dir, "calibrate",
                   {{"scenario", c.scenario}, {"n_tests", n_tests}, {"travel_samples", travel_samples},
                    {"seed", seed}, {"jobs", c.jobs}},
                   seconds_since(t0), {{"successes", report.successes}, {"sim_calls", model.calls()}});
    std::cout << "successes " << json(report.successes).dump() << " of " << n_tests << " per type\n";
    return kOk;
}

int cmd_plan(const Common& c, const PlanArgs& a, opt::SearchMode mode) {
    const auto t0 = std::chrono::steady_clock::now();
    auto sc = load_valid_scenario(c.scenario);
    auto params = sc.pso;
    if (a.seed) params.seed = *a.seed;
    if (!a.weights.empty()) {
        params.w_time = a.weights[0];
        params.w_manip = a.weights[1];
    }
    human::HumanSchedule schedule;
    if (a.human == "offline") {
        schedule = human::offline_schedule();
    } else {
        if (a.schedule.empty()) throw InputError("--schedule is required unless --human offline");
        schedule = io::load_schedule(a.schedule);
    }
    if (const auto issues = human::validate_schedule(schedule); !issues.empty()) {
        std::ostringstream os;
        os << "invalid schedule:";
        for (const auto& v : issues) os << "\n  " << v;
        throw InputError(os.str());
    }
    const auto stats = io::load_stats(a.stats);
    if (stats.types.size() != static_cast<std::size_t>(sc.type_count())) {
        throw InputError("stats file has " + std::to_string(stats.types.size()) + " types, scenario has " +
                         std::to_string(sc.type_count()));
    }

    const auto layout = packing::compute_layout(sc.items, sc.boxes, sc.packing.margin);
    const sim::DigitalModel model(sc);
    planner::PlannerOptions options;
    options.mode = mode;
    options.jobs = c.jobs;
    const auto plan = planner::plan(model, layout, schedule, stats, params, options);

    const auto dir = out_dir(c);
    io::write_text(dir / "plan.json", io::dump(io::to_json(plan)));
    io::write_text(dir / "gantt.svg", report::gantt_svg(plan, schedule));
    io::write_text(dir / "dmin.csv", report::dmin_timeline_csv(sc, plan, schedule));
    const bool offline = a.human == "offline";
    write_manifest(dir, mode == opt::SearchMode::Pso ? "plan" : "baseline",
                   {{"scenario", c.scenario},
                    {"schedule", offline ? json("offline") : json(a.schedule)},
                    {"stats", a.stats},
                    {"seed", params.seed},
                    {"weights", json::array({params.w_time, params.w_manip})},
                    {"iterations", params.iterations},
                    {"particles", params.particles},
                    {"jobs", c.jobs}},
                   seconds_since(t0),
                   {{"sim_calls", plan.sim_calls}, {"total_time", plan.total_time}, {"best_psi", plan.best_psi}});
    std::cout << "theta* " << json(plan.theta_star).dump() << "  kappa* " << json(plan.kappa_star).dump()
              << "  total " << plan.total_time << " s  best psi " << plan.best_psi << "  sim calls "
              << plan.sim_calls << '\n';
    return kOk;
}

int cmd_simulate(const Common& c, const std::string& plan_path) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto sc = load_valid_scenario(c.scenario);
    const auto plan = io::load_plan(plan_path);
    const sim::DigitalModel model(sc);

    std::ostringstream trace;
    std::ostringstream tasks;
    trace << "task,t,segment,primitive,x,y,z,yaw,inv_manip\n";
    tasks << "task,type,item,kappa,start,travel,wait,t_pp,end,t_pp_plan\n";
    double t = 0.0;
    double worst = 0.0;
    for (std::size_t w = 0; w < plan.tasks.size(); ++w) {
        const auto& task = plan.tasks[w];
        const auto r = model.simulate(task.base, {task.type, task.pick, task.place, task.kappa}, true);
        if (!r.feasible()) throw InputError("task " + std::to_string(w) + " is infeasible on replay");
        const double start = t;
        t += task.travel + task.wait;
        trace << report::trace_csv(static_cast<int>(w), t, r);
        t += r.t_pp;
        worst = std::max(worst, std::abs(t - task.end));
        tasks << w << ',' << task.type << ',' << task.item << ',' << task.kappa << ',' << start << ','
              << task.travel << ',' << task.wait << ',' << r.t_pp << ',' << t << ',' << task.t_pp << '\n';
    }
    const auto dir = out_dir(c);
    io::write_text(dir / "trace.csv", trace.str());
    io::write_text(dir / "tasks.csv", tasks.str());
    write_manifest(dir, "simulate", {{"scenario", c.scenario}, {"plan", plan_path}}, seconds_since(t0),
                   {{"total_time", t}, {"max_timeline_error", worst}, {"sim_calls", model.calls()}});
    std::cout << "replayed " << plan.tasks.size() << " tasks, total " << t << " s, max timeline error " << worst
              << " s\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mobile manipulator base-pose and sequence planner"};
    app.require_subcommand(1);

    Common common;
    PlanArgs plan_args;
    int n_tests = 2000;
    int travel_samples = 100000;
    std::uint64_t calib_seed = 1;
    std::string plan_path;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--scenario", common.scenario, "Scenario file")->required();
        sub->add_option("--out", common.out, "Output directory (default $MMPLAN_OUT or ./mmplan_out)");
        sub->add_option("--jobs", common.jobs, "Worker threads (0 = OpenMP default)")->check(CLI::NonNegativeNumber);
    };

    auto* layout = app.add_subcommand("layout", "Compute the place-side layout");
    add_common(layout);

    auto* calibrate = app.add_subcommand("calibrate", "Estimate normalization statistics");
    add_common(calibrate);
    calibrate->add_option("--n-tests", n_tests, "Rollouts per item type")->check(CLI::PositiveNumber);
    calibrate->add_option("--travel-samples", travel_samples, "Rail travel samples")->check(CLI::PositiveNumber);
    calibrate->add_option("--seed", calib_seed, "Random seed");

    auto add_plan = [&](CLI::App* sub) {
        add_common(sub);
        sub->add_option("--schedule", plan_args.schedule, "Operator schedule file");
        sub->add_option("--stats", plan_args.stats, "Normalization statistics file")->required();
        sub->add_option("--seed", plan_args.seed, "Random seed (overrides the scenario)");
        sub->add_option("--weights", plan_args.weights, "Fitness weights w_t w_delta")->expected(2);
        sub->add_option("--human", plan_args.human, "Operator mode")->check(CLI::IsMember({"offline"}));
    };
    auto* plan = app.add_subcommand("plan", "Optimize base poses, order and scaling with PSO");
    add_plan(plan);
    auto* baseline = app.add_subcommand("baseline", "Same as plan with uniformly resampled particles");
    add_plan(baseline);

    auto* simulate = app.add_subcommand("simulate", "Replay a plan and emit the trace");
    add_common(simulate);
    simulate->add_option("--plan", plan_path, "Plan file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (layout->parsed()) return cmd_layout(common);
        if (calibrate->parsed()) return cmd_calibrate(common, n_tests, travel_samples, calib_seed);
        if (plan->parsed()) return cmd_plan(common, plan_args, opt::SearchMode::Pso);
        if (baseline->parsed()) return cmd_plan(common, plan_args, opt::SearchMode::Random);
        if (simulate->parsed()) return cmd_simulate(common, plan_path);
    } catch (const io::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIo;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIo;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIo;
    } catch (const packing::LayoutInfeasible& e) {
        std::cerr << "infeasible: " << e.what() << '\n';
        return kInfeasible;
    } catch (const planner::PlanInfeasible& e) {
        std::cerr << "infeasible: " << e.what() << '\n';
        return kInfeasible;
    } catch (const std::exception& e) {
        std::cerr << "optimizer failure: " << e.what() << '\n';
        return kOptimizer;
    }
    return kOk;
}
