#include "uavplan/eval.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <queue>

#include <nlohmann/json.hpp>

#include "uavplan/energy.hpp"

namespace uavplan::eval {

using planner::Trajectory;

namespace {

bool diagonal_step(const Trajectory& t, std::size_t k) {
  return t.waypoints[k].i != t.waypoints[k - 1].i && t.waypoints[k].j != t.waypoints[k - 1].j;
}

double step_length(const Trajectory& t, std::size_t k, const GridSpec& grid) {
  const double di = t.waypoints[k].i - t.waypoints[k - 1].i;
  const double dj = t.waypoints[k].j - t.waypoints[k - 1].j;
  return grid.step * std::hypot(di, dj);
}

}  // namespace

int count_handoffs(const Trajectory& t) {
  int n = 0;
  for (std::size_t k = 1; k < t.cells.size(); ++k) {
    if (t.cells[k] != t.cells[k - 1]) ++n;
  }
  return n;
}

double total_distance(const Trajectory& t, const GridSpec& grid) {
  double d = 0.0;
  for (std::size_t k = 1; k < t.size(); ++k) d += step_length(t, k, grid);
  return d;
}

Disconnectivity disconnectivity_distance(const Trajectory& t, const GridSpec& grid,
                                         double threshold_dbm) {
  Disconnectivity out;
  double total = 0.0;
  for (std::size_t k = 1; k < t.size(); ++k) {
    const double d = step_length(t, k, grid);
    total += d;
    if (t.rsrps[k - 1] < threshold_dbm && t.rsrps[k] < threshold_dbm) out.meters += d;
  }
  out.percent = total > 0.0 ? 100.0 * out.meters / total : 0.0;
  return out;
}

double mission_energy(const Trajectory& t, const Scenario& scenario) {
  double total = 0.0;
  for (std::size_t k = 1; k < t.size(); ++k) {
    total += energy::segment_energy(scenario.speed, step_length(t, k, scenario.grid),
                                    scenario.power);
  }
  return total;
}

double objective_value(const Trajectory& t, const Scenario& scenario) {
  return objective_value(t, scenario, scenario.weights);
}

double objective_value(const Trajectory& t, const Scenario& scenario, const Weights& w) {
  const double e = mission_energy(t, scenario);
  const double d =
      disconnectivity_distance(t, scenario.grid, scenario.rsrp_threshold_dbm).meters;
  return w.energy * e + w.signal * d + w.handoff * count_handoffs(t);
}

double normalized_objective(const Trajectory& t, const Weights& w, double threshold_dbm) {
  double cost = 0.0;
  for (std::size_t k = 1; k < t.size(); ++k) {
    cost += w.energy * (diagonal_step(t, k) ? 1.0 : 1.0 / std::numbers::sqrt2);
    if (t.rsrps[k] < threshold_dbm) cost += w.signal;
    if (t.cells[k] != t.cells[k - 1]) cost += w.handoff;
  }
  return cost;
}

double battery_pct(const Trajectory& t, const Scenario& scenario, bool include_vertical) {
  double used = mission_energy(t, scenario);
  if (include_vertical) {
    used += 2.0 * energy::segment_energy(scenario.speed, scenario.grid.altitude, scenario.power);
  }
  return 100.0 * used / scenario.energy_budget();
}

MissionMetrics evaluate(const Trajectory& t, const Scenario& scenario) {
  return evaluate(t, scenario, scenario.weights);
}

MissionMetrics evaluate(const Trajectory& t, const Scenario& scenario, const Weights& w) {
  MissionMetrics m;
  m.waypoints = t.size();
  m.handoffs = count_handoffs(t);
  const auto disc = disconnectivity_distance(t, scenario.grid, scenario.rsrp_threshold_dbm);
  m.disconnected_m = disc.meters;
  m.disconnectivity_pct = disc.percent;
  m.energy_j = mission_energy(t, scenario);
  m.battery_pct = battery_pct(t, scenario);
  m.objective = objective_value(t, scenario, w);
  m.normalized_objective = normalized_objective(t, w, scenario.rsrp_threshold_dbm);
  m.total_distance = total_distance(t, scenario.grid);
  m.reached_goal = !t.empty() && t.waypoints.front() == scenario.start &&
                   t.waypoints.back() == scenario.goal;
  return m;
}

std::vector<std::pair<double, double>> rsrp_cdf(const Trajectory& t) {
  std::vector<double> values = t.rsrps;
  std::sort(values.begin(), values.end());
  std::vector<std::pair<double, double>> cdf;
  const double n = static_cast<double>(values.size());
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k + 1 < values.size() && values[k + 1] == values[k]) continue;
    cdf.emplace_back(values[k], k + 1 == values.size() ? 1.0 : static_cast<double>(k + 1) / n);
  }
  return cdf;
}

double cdf_at(const std::vector<std::pair<double, double>>& cdf, double x) {
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), x,
                                   [](double v, const auto& p) { return v < p.first; });
  if (it == cdf.begin()) return 0.0;
  return std::prev(it)->second;
}

// ---------------------------------------------------------------------------
// Product-graph oracle

OracleResult oracle_optimal(const Scenario& scenario, const radio::RadioMap& map,
                            std::size_t max_nodes) {
  return oracle_optimal(scenario, map, scenario.weights, max_nodes);
}

OracleResult oracle_optimal(const Scenario& scenario, const radio::RadioMap& map,
                            const Weights& w, std::size_t max_nodes) {
  const auto& grid = map.grid();
  const int ranks = map.candidates();
  const std::size_t nodes = grid.num_points() * static_cast<std::size_t>(ranks);
  if (nodes > max_nodes) {
    throw ValidationError("oracle instance too large: " + std::to_string(nodes) + " nodes");
  }
  if (!grid.contains(scenario.start) || !grid.contains(scenario.goal)) {
    throw ValidationError("start or goal outside the radio map");
  }

  const auto node_of = [&](GridPoint p, int r) {
    return grid.index(p) * static_cast<std::size_t>(ranks) + static_cast<std::size_t>(r);
  };
  const double threshold = scenario.rsrp_threshold_dbm;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(nodes, kInf);
  std::vector<std::size_t> parent(nodes, nodes);
  std::vector<char> done(nodes, 0);

  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  const std::size_t source = node_of(scenario.start, 0);
  dist[source] = 0.0;
  open.push({0.0, source});

  std::size_t target = nodes;
  while (!open.empty()) {
    const auto [d, u] = open.top();
    open.pop();
    if (done[u]) continue;
    done[u] = 1;
    const GridPoint p = grid.point(u / static_cast<std::size_t>(ranks));
    if (p == scenario.goal) {
      target = u;
      break;
    }
    const int cell = map.at(p, static_cast<int>(u % static_cast<std::size_t>(ranks))).cell_id;
    for (int dir = 0; dir < kNumDirections; ++dir) {
      const auto direction = static_cast<Direction>(dir);
      const GridPoint q = moved(p, direction);
      if (!grid.contains(q)) continue;
      const double motion = w.energy * (is_cardinal(direction) ? 1.0 / std::numbers::sqrt2 : 1.0);
      for (int r = 0; r < ranks; ++r) {
        const auto& cand = map.at(q, r);
        double cost = motion;
        if (cand.rsrp_dbm < threshold) cost += w.signal;
        if (cand.cell_id != cell) cost += w.handoff;
        const std::size_t v = node_of(q, r);
        if (done[v]) continue;
        if (d + cost < dist[v]) {
          dist[v] = d + cost;
          parent[v] = u;
          open.push({dist[v], v});
        }
      }
    }
  }
  if (target == nodes) throw InfeasibleError("goal unreachable in the product graph");

  std::vector<std::size_t> chain;
  for (std::size_t v = target; v != nodes; v = parent[v]) chain.push_back(v);
  std::reverse(chain.begin(), chain.end());

  OracleResult result;
  result.nodes = nodes;
  for (const auto v : chain) {
    const GridPoint p = grid.point(v / static_cast<std::size_t>(ranks));
    const auto& cand = map.at(p, static_cast<int>(v % static_cast<std::size_t>(ranks)));
    result.trajectory.push_back(p, cand.cell_id, cand.rsrp_dbm);
  }
  result.cost = normalized_objective(result.trajectory, w, threshold);
  return result;
}

std::string metrics_to_json(const MissionMetrics& m, const std::string& planner) {
  nlohmann::ordered_json j = {
      {"planner", planner},
      {"reached_goal", m.reached_goal},
      {"waypoints", m.waypoints},
      {"handoffs", m.handoffs},
      {"disconnected_m", m.disconnected_m},
      {"disconnectivity_pct", m.disconnectivity_pct},
      {"total_distance_m", m.total_distance},
      {"energy_J", m.energy_j},
      {"battery_pct", m.battery_pct},
      {"objective", m.objective},
      {"normalized_objective", m.normalized_objective},
  };
  return j.dump(2) + "\n";
}

void write_cdf_csv(const std::vector<std::pair<double, double>>& cdf, std::ostream& out) {
  out << "rsrp_dbm,cdf\n" << std::setprecision(12);
  for (const auto& [x, p] : cdf) out << x << ',' << p << '\n';
}

}  // namespace uavplan::eval
