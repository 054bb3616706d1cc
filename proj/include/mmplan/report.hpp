#pragma once

#include <string>
#include <vector>

#include "mmplan/core.hpp"
#include "mmplan/human.hpp"
#include "mmplan/packing.hpp"
#include "mmplan/simulator.hpp"

namespace mmplan::report {

/// Top view of the cell: rail, pick-side items, boxes and layout footprints.
std::string layout_svg(const Scenario& scenario, const packing::PlacementLayout& layout);

/// Two-row Gantt chart: robot tasks (travel, wait, pick-and-place shaded by
/// kappa) above the operator schedule.
std::string gantt_svg(const Plan& plan, const human::HumanSchedule& schedule);

/// Minimum operator distance to the active robot task's pick and place points,
/// sampled every `dt` seconds over the plan.
/// Columns: t,task,phase,kappa,d_pick,d_place,d_min (empty distance = away).
std::string dmin_timeline_csv(const Scenario& scenario, const Plan& plan,
                              const human::HumanSchedule& schedule, double dt = 0.1);

/// Replayed rollout of one plan task as CSV rows, times offset by `t0`.
/// Columns: task,t,segment,primitive,x,y,z,yaw,inv_manip.
std::string trace_csv(int task, double t0, const sim::SimResult& result);

}  // namespace mmplan::report
