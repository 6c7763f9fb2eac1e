#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "uavplan/radio_map.hpp"
#include "uavplan/scenario.hpp"

namespace uavplan::planner {

// Agent state: position plus serving cell. serving_rank is the cell's rank
// among the map candidates at `position`.
struct State {
  GridPoint position;
  int serving_cell = 0;
  int serving_rank = 0;

  friend bool operator==(const State&, const State&) = default;
};

struct Action {
  Direction direction = Direction::E;
  int cell_rank = 0;

  friend bool operator==(const Action&, const Action&) = default;
};

inline int action_index(const Action& a, int ranks) {
  return static_cast<int>(a.direction) * ranks + a.cell_rank;
}
inline Action action_from_index(int index, int ranks) {
  return {static_cast<Direction>(index / ranks), index % ranks};
}

// Ordered waypoints with their serving cells and serving-cell RSRPs.
struct Trajectory {
  std::vector<GridPoint> waypoints;
  std::vector<int> cells;
  std::vector<double> rsrps;

  std::size_t size() const { return waypoints.size(); }
  bool empty() const { return waypoints.empty(); }
  void push_back(GridPoint p, int cell, double rsrp_dbm) {
    waypoints.push_back(p);
    cells.push_back(cell);
    rsrps.push_back(rsrp_dbm);
  }
  // Throws ValidationError when lengths differ or a step is not an
  // 8-neighbour move.
  void validate() const;
};

// Bitmask of directions that stay on the grid from p (bit d set = legal).
std::uint8_t legal_directions(GridPoint p, int grid_size);

// Initial state at `start`: the strongest cell there.
State initial_state(GridPoint start, const radio::RadioMap& map);

// Deterministic transition. Throws ValidationError on an off-grid move or
// an out-of-range cell rank.
State step(const State& state, const Action& action,
           const radio::RadioMap& map);

// Per-step reward in [-1, 0]:
// w_en W_mo + w_sig W_sig + w_ho W_ho with W_mo = -1/sqrt(2) (cardinal) or
// -1 (diagonal), W_ho = -1 on a change of serving cell, W_sig = -1 when the
// new serving cell's RSRP is below the threshold.
double reward(const State& prev, const State& next,
              const radio::RadioMap& map, const Weights& weights,
              double threshold_dbm);

// Same terms from raw inputs.
double reward_terms(bool diagonal, bool handoff, bool covered,
                    const Weights& weights);

// Dense Q-table, zero-initialised.
class QTable {
 public:
  QTable() = default;
  QTable(int grid_size, int ranks, StateMode mode);

  int grid_size() const { return grid_size_; }
  int ranks() const { return ranks_; }
  int num_actions() const { return kNumDirections * ranks_; }
  StateMode mode() const { return mode_; }

  std::span<double> row(const State& s) { return {values_.data() + offset(s), width()}; }
  std::span<const double> row(const State& s) const {
    return {values_.data() + offset(s), width()};
  }
  double& at(const State& s, const Action& a) {
    return values_[offset(s) + static_cast<std::size_t>(action_index(a, ranks_))];
  }
  double at(const State& s, const Action& a) const {
    return values_[offset(s) + static_cast<std::size_t>(action_index(a, ranks_))];
  }

  // Largest value over the actions legal at s.
  double max_legal(const State& s) const;

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  // Dimensions: J, J, [M'], 8, M'.
  std::vector<std::size_t> shape() const;

  friend bool operator==(const QTable&, const QTable&) = default;

 private:
  std::size_t width() const { return static_cast<std::size_t>(num_actions()); }
  std::size_t offset(const State& s) const;

  int grid_size_ = 0;
  int ranks_ = 0;
  StateMode mode_ = StateMode::kPosition;
  std::vector<double> values_;
};

// Q(s,a) <- (1 - alpha) Q(s,a) + alpha (reward + beta max_a' Q(s',a')),
// the max running over actions legal at s'. Returns the new value.
double q_update(QTable& q, const State& s, const Action& a, double reward,
                const State& next, double alpha, double beta);

using Rng = std::mt19937_64;

// Epsilon-greedy over legal actions: a uniform legal action when the draw
// kappa < epsilon, else the legal argmax with ties to the lowest index.
Action select_action(const QTable& q, const State& s, double epsilon,
                     Rng& rng);

// Greedy legal argmax (lowest index on ties).
Action greedy_action(const QTable& q, const State& s);

struct EpisodeLog {
  int episode = 0;
  double cumulative_reward = 0.0;
  int steps = 0;
  bool reached_goal = false;
  double energy_j = 0.0;
  double epsilon = 0.0;  // value after the episode's last action
};

struct TrainResult {
  QTable q;
  Trajectory best;
  double best_reward = 0.0;  // cumulative reward of `best`
  int best_episode = -1;     // -1: the final greedy rollout
  std::vector<EpisodeLog> log;
  double epsilon_decay = 0.0;
  int max_steps = 0;
  int feasible_episodes = 0;
};

// Resolved per-action epsilon decay and step cap for a scenario.
double resolve_epsilon_decay(const Scenario& scenario);
int resolve_max_steps(const Scenario& scenario);

// Q-learning over `scenario.rl.max_episodes` episodes from the start point.
// Returns the feasible goal-reaching episode with the highest cumulative
// reward; the final greedy rollout also competes. Throws InfeasibleError
// with diagnostics when no episode is feasible.
TrainResult train(const Scenario& scenario, const radio::RadioMap& map);

class RolloutError : public InfeasibleError {
 public:
  using InfeasibleError::InfeasibleError;
};

// Greedy walk from the start until the goal. Throws RolloutError on a
// revisited decision state or when the step cap is hit.
Trajectory rollout(const QTable& q, const Scenario& scenario,
                   const radio::RadioMap& map, int max_steps = 0);

// File formats.

// Binary Q-table: magic "UAVQTAB1", version, mode, J, M', seed, episodes,
// value count, then float64 values.
void write_qtable(const QTable& q, std::uint64_t seed, int episodes,
                  std::ostream& out);
struct QTableFile {
  QTable q;
  std::uint64_t seed = 0;
  int episodes = 0;
};
QTableFile read_qtable(std::istream& in);
void save_qtable(const QTable& q, std::uint64_t seed, int episodes,
                 const std::filesystem::path& path);
QTableFile load_qtable(const std::filesystem::path& path);

// CSV: episode,cumulative_reward,steps,reached_goal,energy_J
void write_training_log(std::span<const EpisodeLog> log, std::ostream& out);

// CSV: step,i,j,x_m,y_m,cell_id,rsrp_dbm
void write_trajectory_csv(const Trajectory& t, const GridSpec& grid,
                          std::ostream& out);
Trajectory read_trajectory_csv(std::istream& in);

}  // namespace uavplan::planner
