#include "mmplan/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "mmplan/motion.hpp"

namespace mmplan::opt {

namespace {

constexpr std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr double kSigmaFloor = 1e-6;

double clip(double v, const Interval& lim) { return std::clamp(v, lim.min, lim.max); }

void track_bests(SwarmState& state, std::span<const double> psi, std::span<const double> t_pp,
                 std::span<const double> delta) {
    const std::size_t n = state.position.size();
    if (psi.size() != n || t_pp.size() != n || delta.size() != n) {
        throw Error("fitness vector size does not match the swarm");
    }
    for (std::size_t q = 0; q < n; ++q) {
        if (psi[q] < state.personal_best_psi[q]) {
            state.personal_best[q] = state.position[q];
            state.personal_best_psi[q] = psi[q];
        }
    }
    const auto h = static_cast<std::size_t>(std::min_element(psi.begin(), psi.end()) - psi.begin());
    if (psi[h] < state.global_best_psi) {
        state.global_best = state.position[h];
        state.global_best_psi = psi[h];
        state.global_best_tpp = t_pp[h];
        state.global_best_delta = delta[h];
    }
}

}  // namespace

std::uint64_t CounterRng::bits(std::initializer_list<std::uint64_t> key) const {
    std::uint64_t h = splitmix(seed_);
    for (const auto k : key) h = splitmix(h ^ splitmix(k + 0x632be59bd9b4e019ULL));
    return h;
}

double CounterRng::uniform(std::initializer_list<std::uint64_t> key) const {
    return static_cast<double>(bits(key) >> 11) * 0x1.0p-53;
}

Normalized normalize(std::span<const double> t_pp, std::span<const double> delta, const TypeStats& stats) {
    if (!(stats.sigma_t > 0.0) || !(stats.sigma_delta > 0.0)) throw Error("normalization needs sigma > 0");
    Normalized out;
    out.z_t.reserve(t_pp.size());
    out.z_delta.reserve(delta.size());
    for (double t : t_pp) out.z_t.push_back(std::isinf(t) ? kInf : (t - stats.mu_t) / stats.sigma_t);
    for (double d : delta) out.z_delta.push_back(std::isinf(d) ? kInf : (d - stats.mu_delta) / stats.sigma_delta);
    return out;
}

double fitness(double z_t, double z_delta, double w_t, double w_delta, double xi_f, double xi_c) {
    if (std::isinf(xi_f) || std::isinf(xi_c)) return kInf;
    const double time = w_t == 0.0 ? 0.0 : w_t * z_t;
    const double manip = w_delta == 0.0 ? 0.0 : w_delta * z_delta;
    return time + manip + xi_f + xi_c;
}

double inertia(int p, int n_s, double omega_0, double omega_n) {
    return omega_0 + p * (omega_n - omega_0) / n_s;
}

SwarmState init_swarm(const PsoParams& params, const CounterRng& rng, std::uint64_t spot, std::uint64_t item) {
    const auto n = static_cast<std::size_t>(params.particles);
    const auto dof = params.p_lim.size();
    SwarmState s;
    s.position.assign(n, BasePose(dof));
    s.velocity.assign(n, BasePose(dof));
    for (std::size_t q = 0; q < n; ++q) {
        for (std::size_t d = 0; d < dof; ++d) {
            s.position[q][d] = rng.uniform(params.p_lim[d].min, params.p_lim[d].max, {kInitPosition, spot, item, q, d});
            s.velocity[q][d] = rng.uniform(params.v_lim[d].min, params.v_lim[d].max, {kInitVelocity, spot, item, q, d});
        }
    }
    s.personal_best = s.position;
    s.personal_best_psi.assign(n, kInf);
    s.global_best.assign(dof, 0.0);
    return s;
}

void update_swarm(SwarmState& state, std::span<const double> psi, std::span<const double> t_pp,
                  std::span<const double> delta, std::span<const double> r1, std::span<const double> r2,
                  double omega, const PsoParams& params) {
    track_bests(state, psi, t_pp, delta);
    for (std::size_t q = 0; q < state.position.size(); ++q) {
        auto& x = state.position[q];
        auto& v = state.velocity[q];
        for (std::size_t d = 0; d < x.size(); ++d) {
            v[d] = omega * v[d] + params.c_cognitive * r1[q] * (state.personal_best[q][d] - x[d]) +
                   params.c_social * r2[q] * (state.global_best[d] - x[d]);
            x[d] = clip(x[d] + v[d], params.p_lim[d]);
        }
    }
    ++state.iteration;
}

void resample_swarm(SwarmState& state, std::span<const double> psi, std::span<const double> t_pp,
                    std::span<const double> delta, const PsoParams& params, const CounterRng& rng,
                    std::uint64_t spot, std::uint64_t item) {
    track_bests(state, psi, t_pp, delta);
    ++state.iteration;
    const auto p = static_cast<std::uint64_t>(state.iteration);
    for (std::size_t q = 0; q < state.position.size(); ++q) {
        for (std::size_t d = 0; d < state.position[q].size(); ++d) {
            state.position[q][d] =
                rng.uniform(params.p_lim[d].min, params.p_lim[d].max, {kResample, spot, item, p, q, d});
        }
    }
}

SwarmResult run_swarm(const sim::DigitalModel& model, const sim::PnpTask& task, const TypeStats& stats,
                      const PsoParams& params, std::uint64_t spot, std::uint64_t item,
                      const SearchOptions& options) {
    const CounterRng rng(params.seed);
    SwarmState state = init_swarm(params, rng, spot, item);
    const auto n = static_cast<std::size_t>(params.particles);

    std::vector<double> t_pp(n), delta(n), psi(n), r1(n), r2(n);
    SwarmResult out;
    for (int p = 1; p <= params.iterations; ++p) {
        const auto results = model.batch_simulate(state.position, task, options.jobs);
        for (std::size_t q = 0; q < n; ++q) {
            t_pp[q] = results[q].t_pp;
            delta[q] = results[q].delta_bar;
        }
        const auto z = normalize(t_pp, delta, stats);
        for (std::size_t q = 0; q < n; ++q) {
            psi[q] = fitness(z.z_t[q], z.z_delta[q], params.w_time, params.w_manip, results[q].xi_f,
                             results[q].xi_c);
        }

        if (options.mode == SearchMode::Pso) {
            const auto it = static_cast<std::uint64_t>(p);
            for (std::size_t q = 0; q < n; ++q) {
                r1[q] = rng.uniform({kCognitive, spot, item, it, q});
                r2[q] = rng.uniform({kSocial, spot, item, it, q});
            }
            update_swarm(state, psi, t_pp, delta, r1, r2,
                         inertia(p, params.iterations, params.inertia_start, params.inertia_end), params);
        } else {
            resample_swarm(state, psi, t_pp, delta, params, rng, spot, item);
        }
        out.psi_history.push_back(state.global_best_psi);
        if (options.observer) options.observer(state);
    }
    out.best = state.global_best;
    out.psi = state.global_best_psi;
    out.t_pp = state.global_best_tpp;
    out.delta = state.global_best_delta;
    return out;
}

Eigen::Vector3d work_point(const Scenario& scenario, const Pose2& pose) {
    return {pose.x, pose.y, scenario.table_z};
}

std::vector<ItemOutcome> run_pso(const sim::DigitalModel& model, const SpotRequest& request,
                                 const NormStats& stats, const human::HumanSchedule& schedule,
                                 const PsoParams& params, const SearchOptions& options) {
    const auto& sc = model.scenario();
    const auto& item_type = sc.items.at(static_cast<std::size_t>(request.type));
    const auto& type_stats = stats.types.at(static_cast<std::size_t>(request.type));
    std::vector<ItemOutcome> out(item_type.pick_poses.size());

    for (std::size_t s = 0; s < out.size(); ++s) {
        if (s < request.packed.size() && request.packed[s]) continue;
        auto& o = out[s];
        const auto& pick = item_type.pick_poses[s];
        const auto hold = human::hold_until_clear(schedule, request.t_c, request.t_w, work_point(sc, pick),
                                                  work_point(sc, request.place), sc.scaling);
        o.kappa = hold.decision.kappa;
        o.d_min = hold.decision.d_min;
        o.wait = hold.wait;
        if (!hold.feasible) {
            o.status = ItemStatus::Blocked;
            continue;
        }
        const sim::PnpTask task{request.type, pick, request.place, o.kappa};
        const auto swarm = run_swarm(model, task, type_stats, params, request.spot_key, s, options);
        o.psi = swarm.psi;
        if (std::isinf(swarm.psi)) {
            o.status = ItemStatus::AllInfeasible;
            continue;
        }
        o.status = ItemStatus::Optimized;
        o.x_bar = swarm.best;
        o.t_pp = swarm.t_pp;
        o.delta = swarm.delta;
    }
    return out;
}

std::vector<ItemOutcome> random_baseline(const sim::DigitalModel& model, const SpotRequest& request,
                                         const NormStats& stats, const human::HumanSchedule& schedule,
                                         const PsoParams& params, int jobs) {
    SearchOptions options;
    options.mode = SearchMode::Random;
    options.jobs = jobs;
    return run_pso(model, request, stats, schedule, params, options);
}

// ---------------------------------------------------------------------------

TypeStats summarize_rollouts(std::span<const double> t_pp, std::span<const double> delta,
                             std::vector<std::string>& warnings, const std::string& label) {
    auto moments = [](std::span<const double> v) {
        const double n = static_cast<double>(v.size());
        const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        return std::pair{mean, v.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0};
    };
    TypeStats s;
    std::tie(s.mu_t, s.sigma_t) = moments(t_pp);
    std::tie(s.mu_delta, s.sigma_delta) = moments(delta);
    if (s.sigma_t < kSigmaFloor) {
        warnings.push_back("DegenerateVariance: " + label + " time sigma floored at 1e-6");
        s.sigma_t = kSigmaFloor;
    }
    if (s.sigma_delta < kSigmaFloor) {
        warnings.push_back("DegenerateVariance: " + label + " manipulability sigma floored at 1e-6");
        s.sigma_delta = kSigmaFloor;
    }
    return s;
}

double mean_travel_time(const RobotModel& robot, std::span<const Interval> p_lim, int samples,
                        const CounterRng& rng) {
    double sum = 0.0;
    BasePose a(p_lim.size()), b(p_lim.size());
    for (int n = 0; n < samples; ++n) {
        const auto k = static_cast<std::uint64_t>(n);
        for (std::size_t d = 0; d < p_lim.size(); ++d) {
            a[d] = rng.uniform(p_lim[d].min, p_lim[d].max, {kTravelSample, k, d, 0});
            b[d] = rng.uniform(p_lim[d].min, p_lim[d].max, {kTravelSample, k, d, 1});
        }
        sum += motion::travel_time(a, b, robot.base.v_max, robot.base.a_max);
    }
    return sum / samples;
}

CalibrationReport calibrate(const sim::DigitalModel& model, const packing::PlacementLayout& layout,
                            const CalibrationOptions& options) {
    if (options.n_tests < 30) throw Error("calibration needs at least 30 tests per type");
    const auto& sc = model.scenario();
    const CounterRng rng(options.seed);
    const auto& p_lim = sc.pso.p_lim;

    CalibrationReport report;
    report.stats.n_tests = options.n_tests;
    for (int i = 0; i < sc.type_count(); ++i) {
        const auto& item = sc.items[static_cast<std::size_t>(i)];
        std::vector<Pose2> spots;
        for (int b : sc.boxes_of_type(i)) {
            const auto& box_spots = layout.spots[static_cast<std::size_t>(b)];
            spots.insert(spots.end(), box_spots.begin(), box_spots.end());
        }
        if (spots.empty()) throw TooFewSuccesses("item type " + std::to_string(i) + " has no place spot");

        std::vector<sim::SimResult> results(static_cast<std::size_t>(options.n_tests));
        const auto ti = static_cast<std::uint64_t>(i);
#ifdef _OPENMP
        const int threads = options.jobs > 0 ? options.jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
#endif
        for (int n = 0; n < options.n_tests; ++n) {
            const auto k = static_cast<std::uint64_t>(n);
            const auto s = static_cast<std::size_t>(rng.uniform({kCalibration, ti, k, 0}) * item.pick_poses.size());
            const auto g = static_cast<std::size_t>(rng.uniform({kCalibration, ti, k, 1}) * spots.size());
            BasePose base(p_lim.size());
            for (std::size_t d = 0; d < p_lim.size(); ++d) {
                base[d] = rng.uniform(p_lim[d].min, p_lim[d].max, {kCalibration, ti, k, 2 + d});
            }
            results[static_cast<std::size_t>(n)] = model.simulate(base, {i, item.pick_poses[s], spots[g], 0});
        }

        std::vector<double> t_pp, delta;
        for (const auto& r : results) {
            if (r.feasible() && std::isfinite(r.delta_bar)) {
                t_pp.push_back(r.t_pp);
                delta.push_back(r.delta_bar);
            }
        }
        report.successes.push_back(static_cast<int>(t_pp.size()));
        if (t_pp.size() < 30) {
            throw TooFewSuccesses("item type " + std::to_string(i) + ": only " + std::to_string(t_pp.size()) +
                                  " feasible rollouts out of " + std::to_string(options.n_tests));
        }
        report.stats.types.push_back(summarize_rollouts(t_pp, delta, report.warnings, "type " + std::to_string(i)));
    }
    report.stats.mu_tvp = mean_travel_time(sc.robot, p_lim, options.travel_samples, rng);
    return report;
}

}  // namespace mmplan::opt
