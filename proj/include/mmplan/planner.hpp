#pragma once

#include <span>
#include <utility>

#include "mmplan/core.hpp"
#include "mmplan/human.hpp"
#include "mmplan/optimizer.hpp"
#include "mmplan/packing.hpp"
#include "mmplan/simulator.hpp"

namespace mmplan::planner {

class AllInfinite : public Error {
public:
    using Error::Error;
};

class PlanInfeasible : public Error {
public:
    using Error::Error;
};

struct Selection {
    double travel = 0.0;
    int item = 0;
};

/// Minimum entry of C_lambda; ties resolve to the lowest item index.
Selection select_next_item(std::span<const double> travel_times);

struct PlannerOptions {
    opt::SearchMode mode = opt::SearchMode::Pso;
    int jobs = 0;
    opt::SwarmObserver observer;
};

/// Greedy outer loop: for each type, box and spot, optimize the base pose of
/// every unpacked item, then take the one with the shortest base travel.
Plan plan(const sim::DigitalModel& model, const packing::PlacementLayout& layout,
          const human::HumanSchedule& schedule, const NormStats& stats, const PsoParams& params,
          const PlannerOptions& options = {});

}  // namespace mmplan::planner
