#pragma once

#include <optional>
#include <string>

#include "uavplan/planner.hpp"

namespace uavplan::baselines {

// Octile distance in metres between two grid points.
double octile_distance(GridPoint a, GridPoint b, double step);

// Canonical octile geodesic (diagonal steps first, then straight), always
// served by the strongest cell.
planner::Trajectory shortest_path(const Scenario& scenario,
                                  const radio::RadioMap& map);

// Weights used by the RSRP-aware baseline: energy 0.10, signal 0.90,
// handoff 0.
inline constexpr Weights kRsrpAwareWeights{0.10, 0.90, 0.0};

// Q-learning restricted to strongest-cell association, ignoring handoffs.
planner::TrainResult rsrp_aware_plan(const Scenario& scenario,
                                     const radio::RadioMap& map,
                                     const Weights& weights = kRsrpAwareWeights);

// Planner selection shared by the CLI and the experiment drivers.
enum class PlannerKind { kProposed, kProposed2, kShortest, kRsrpAware };

inline constexpr Weights kProposed2Weights{0.04, 0.80, 0.16};

PlannerKind parse_planner(const std::string& name);
std::string planner_name(PlannerKind kind);

struct PlanOutcome {
  planner::Trajectory trajectory;
  Weights weights;  // weights the planner optimised
  std::optional<planner::TrainResult> training;
};

// Runs one planner. `weights` overrides the planner's default weights;
// it is ignored by the shortest path.
PlanOutcome run_planner(PlannerKind kind, const Scenario& scenario,
                        const radio::RadioMap& map,
                        const std::optional<Weights>& weights = std::nullopt);

}  // namespace uavplan::baselines
