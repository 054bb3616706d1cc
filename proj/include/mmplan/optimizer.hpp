#pragma once

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mmplan/core.hpp"
#include "mmplan/human.hpp"
#include "mmplan/packing.hpp"
#include "mmplan/simulator.hpp"

namespace mmplan::opt {

/// Stateless counter-based generator: every draw is a hash of (seed, key...),
/// so draws do not depend on evaluation order or thread count.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t bits(std::initializer_list<std::uint64_t> key) const;
    /// Uniform in [0, 1).
    double uniform(std::initializer_list<std::uint64_t> key) const;
    double uniform(double lo, double hi, std::initializer_list<std::uint64_t> key) const {
        return lo + (hi - lo) * uniform(key);
    }

private:
    std::uint64_t seed_;
};

/// Draw streams, the first component of every RNG key.
enum Stream : std::uint64_t {
    kInitPosition = 1,
    kInitVelocity = 2,
    kCognitive = 3,
    kSocial = 4,
    kResample = 5,
    kCalibration = 6,
    kTravelSample = 7,
};

struct SwarmState {
    std::vector<BasePose> position;
    std::vector<BasePose> velocity;
    std::vector<BasePose> personal_best;
    std::vector<double> personal_best_psi;
    BasePose global_best;
    double global_best_psi = kInf;
    double global_best_tpp = kInf;
    double global_best_delta = kInf;
    int iteration = 0;
};

struct Normalized {
    std::vector<double> z_t;
    std::vector<double> z_delta;
};

/// z-scores against the statistics of one item type; +inf stays +inf.
Normalized normalize(std::span<const double> t_pp, std::span<const double> delta, const TypeStats& stats);

/// w_t z_t + w_d z_d + xi_F + xi_C; a zero weight ignores its term and any
/// infinite penalty yields +inf.
double fitness(double z_t, double z_delta, double w_t, double w_delta, double xi_f, double xi_c);

/// omega = omega_0 + p (omega_n - omega_0) / N_s.
double inertia(int p, int n_s, double omega_0, double omega_n);

/// Random initial swarm (positions in p_lim, velocities in v_lim).
SwarmState init_swarm(const PsoParams& params, const CounterRng& rng, std::uint64_t spot, std::uint64_t item);

/// Personal/global best bookkeeping followed by the velocity and clipped
/// position update. r1 and r2 hold one draw per particle.
void update_swarm(SwarmState& state, std::span<const double> psi, std::span<const double> t_pp,
                  std::span<const double> delta, std::span<const double> r1, std::span<const double> r2,
                  double omega, const PsoParams& params);

/// Best bookkeeping only, positions resampled uniformly (blind-search baseline).
void resample_swarm(SwarmState& state, std::span<const double> psi, std::span<const double> t_pp,
                    std::span<const double> delta, const PsoParams& params, const CounterRng& rng,
                    std::uint64_t spot, std::uint64_t item);

enum class SearchMode { Pso, Random };

struct SwarmResult {
    BasePose best;
    double psi = kInf;
    double t_pp = kInf;
    double delta = kInf;
    std::vector<double> psi_history;  // global best after each iteration
};

using SwarmObserver = std::function<void(const SwarmState&)>;

struct SearchOptions {
    SearchMode mode = SearchMode::Pso;
    int jobs = 0;
    SwarmObserver observer;
};

/// One swarm run for a fixed (pick, place, kappa) request.
SwarmResult run_swarm(const sim::DigitalModel& model, const sim::PnpTask& task, const TypeStats& stats,
                      const PsoParams& params, std::uint64_t spot, std::uint64_t item,
                      const SearchOptions& options);

enum class ItemStatus { Packed, Optimized, AllInfeasible, Blocked };

struct ItemOutcome {
    ItemStatus status = ItemStatus::Packed;
    std::optional<BasePose> x_bar;  // nullopt = +inf marker
    double t_pp = kInf;
    int kappa = 0;
    double wait = 0.0;
    double d_min = kInf;
    double psi = kInf;
    double delta = kInf;
};

struct SpotRequest {
    int type = 0;
    Pose2 place;
    std::vector<bool> packed;  // A, one flag per item of the type
    double t_c = 0.0;
    double t_w = 1.0;
    std::uint64_t spot_key = 0;
};

/// Swarm search for every unpacked item of a type towards one place spot.
/// Entries for packed items keep the +inf marker.
std::vector<ItemOutcome> run_pso(const sim::DigitalModel& model, const SpotRequest& request,
                                 const NormStats& stats, const human::HumanSchedule& schedule,
                                 const PsoParams& params, const SearchOptions& options);

/// run_pso with positions resampled uniformly at each iteration, same budget.
std::vector<ItemOutcome> random_baseline(const sim::DigitalModel& model, const SpotRequest& request,
                                         const NormStats& stats, const human::HumanSchedule& schedule,
                                         const PsoParams& params, int jobs = 0);

/// Point on the work plane used for operator distances.
Eigen::Vector3d work_point(const Scenario& scenario, const Pose2& pose);

// ---------------------------------------------------------------------------
// Calibration

class TooFewSuccesses : public Error {
public:
    using Error::Error;
};

struct CalibrationReport {
    NormStats stats;
    std::vector<int> successes;  // per type
    std::vector<std::string> warnings;
};

/// Mean and sample standard deviation; sigma below 1e-6 is floored and
/// reported as DegenerateVariance.
TypeStats summarize_rollouts(std::span<const double> t_pp, std::span<const double> delta,
                             std::vector<std::string>& warnings, const std::string& label);

/// Mean synchronized travel time between uniform random rail positions.
double mean_travel_time(const RobotModel& robot, std::span<const Interval> p_lim, int samples,
                        const CounterRng& rng);

struct CalibrationOptions {
    int n_tests = 2000;
    int travel_samples = 100000;
    std::uint64_t seed = 1;
    int jobs = 0;
};

CalibrationReport calibrate(const sim::DigitalModel& model, const packing::PlacementLayout& layout,
                            const CalibrationOptions& options);

}  // namespace mmplan::opt
