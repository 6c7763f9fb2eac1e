#include "uavplan/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace uavplan::baselines {

double octile_distance(GridPoint a, GridPoint b, double step) {
  const int dx = std::abs(a.i - b.i);
  const int dy = std::abs(a.j - b.j);
  const int diag = std::min(dx, dy);
  const int straight = std::max(dx, dy) - diag;
  return step * (diag * std::numbers::sqrt2 + straight);
}

planner::Trajectory shortest_path(const Scenario& scenario, const radio::RadioMap& map) {
  const auto& grid = map.grid();
  if (!grid.contains(scenario.start) || !grid.contains(scenario.goal)) {
    throw ValidationError("start or goal outside the radio map");
  }
  planner::Trajectory t;
  GridPoint p = scenario.start;
  t.push_back(p, map.strongest(p).cell_id, map.strongest(p).rsrp_dbm);
  while (p != scenario.goal) {
    const int si = (scenario.goal.i > p.i) - (scenario.goal.i < p.i);
    const int sj = (scenario.goal.j > p.j) - (scenario.goal.j < p.j);
    p = {p.i + si, p.j + sj};
    t.push_back(p, map.strongest(p).cell_id, map.strongest(p).rsrp_dbm);
  }
  return t;
}

planner::TrainResult rsrp_aware_plan(const Scenario& scenario, const radio::RadioMap& map,
                                     const Weights& weights) {
  Scenario s = scenario;
  s.weights = weights;
  return planner::train(s, map.truncated(1));
}

PlannerKind parse_planner(const std::string& name) {
  if (name == "proposed") return PlannerKind::kProposed;
  if (name == "proposed-2") return PlannerKind::kProposed2;
  if (name == "shortest") return PlannerKind::kShortest;
  if (name == "rsrp-aware") return PlannerKind::kRsrpAware;
  throw ValidationError("unknown planner '" + name + "'");
}

std::string planner_name(PlannerKind kind) {
  switch (kind) {
    case PlannerKind::kProposed: return "proposed";
    case PlannerKind::kProposed2: return "proposed-2";
    case PlannerKind::kShortest: return "shortest";
    case PlannerKind::kRsrpAware: return "rsrp-aware";
  }
  return "?";
}

PlanOutcome run_planner(PlannerKind kind, const Scenario& scenario, const radio::RadioMap& map,
                        const std::optional<Weights>& weights) {
  PlanOutcome out;
  switch (kind) {
    case PlannerKind::kShortest:
      out.weights = scenario.weights;
      out.trajectory = shortest_path(scenario, map);
      return out;
    case PlannerKind::kRsrpAware:
      out.weights = weights.value_or(kRsrpAwareWeights);
      out.training = rsrp_aware_plan(scenario, map, out.weights);
      break;
    case PlannerKind::kProposed:
    case PlannerKind::kProposed2: {
      out.weights = weights.value_or(kind == PlannerKind::kProposed ? scenario.weights
                                                                    : kProposed2Weights);
      Scenario s = scenario;
      s.weights = out.weights;
      out.training = planner::train(s, map);
      break;
    }
  }
  out.trajectory = out.training->best;
  return out;
}

}  // namespace uavplan::baselines
