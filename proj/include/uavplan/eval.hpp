#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "uavplan/planner.hpp"

namespace uavplan::eval {

struct MissionMetrics {
  int handoffs = 0;
  double disconnected_m = 0.0;
  double disconnectivity_pct = 0.0;  // % of travelled distance
  double energy_j = 0.0;             // horizontal legs
  double battery_pct = 0.0;
  double objective = 0.0;             // P1 with mixed units
  double normalized_objective = 0.0;  // negated reward sum
  double total_distance = 0.0;        // m
  bool reached_goal = false;
  std::size_t waypoints = 0;
};

int count_handoffs(const planner::Trajectory& t);

struct Disconnectivity {
  double meters = 0.0;
  double percent = 0.0;
};

// Distance over segments whose two endpoints both have serving-cell RSRP
// below the threshold; percent of total distance (0 when nothing flown).
Disconnectivity disconnectivity_distance(const planner::Trajectory& t,
                                         const GridSpec& grid,
                                         double threshold_dbm);

double total_distance(const planner::Trajectory& t, const GridSpec& grid);

double mission_energy(const planner::Trajectory& t, const Scenario& scenario);

// w_en sum E + w_sig sum D + w_ho sum eta (J, m and counts as written).
double objective_value(const planner::Trajectory& t, const Scenario& scenario);
double objective_value(const planner::Trajectory& t, const Scenario& scenario,
                       const Weights& weights);

// Unit-free objective in the reward convention: per step
// w_en (1/sqrt(2) or 1) + w_sig [arrival RSRP < T] + w_ho [handoff].
double normalized_objective(const planner::Trajectory& t,
                            const Weights& weights, double threshold_dbm);

// 100 (mission energy [+ 2 E(v,h)]) / (E_C - E_S).
double battery_pct(const planner::Trajectory& t, const Scenario& scenario,
                   bool include_vertical = true);

MissionMetrics evaluate(const planner::Trajectory& t, const Scenario& scenario);
MissionMetrics evaluate(const planner::Trajectory& t, const Scenario& scenario,
                        const Weights& weights);

// Empirical CDF over waypoint RSRPs: (value, P[X <= value]) at each
// distinct value, ascending.
std::vector<std::pair<double, double>> rsrp_cdf(const planner::Trajectory& t);

// Evaluates a CDF step function at x.
double cdf_at(const std::vector<std::pair<double, double>>& cdf, double x);

struct OracleResult {
  planner::Trajectory trajectory;
  double cost = 0.0;  // normalized objective of the optimum
  std::size_t nodes = 0;
};

// Exact minimum of the normalized objective over (grid point, serving-cell
// rank) paths from (start, rank 0) to the goal, by Dijkstra on the product
// graph. Throws ValidationError when the graph exceeds max_nodes.
OracleResult oracle_optimal(const Scenario& scenario,
                            const radio::RadioMap& map,
                            std::size_t max_nodes = 20'000'000);
OracleResult oracle_optimal(const Scenario& scenario,
                            const radio::RadioMap& map, const Weights& weights,
                            std::size_t max_nodes = 20'000'000);

// JSON report of one run.
std::string metrics_to_json(const MissionMetrics& m, const std::string& planner);

void write_cdf_csv(const std::vector<std::pair<double, double>>& cdf,
                   std::ostream& out);

}  // namespace uavplan::eval
