#include "uavplan/planner.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "uavplan/energy.hpp"

namespace uavplan::planner {

void Trajectory::validate() const {
  if (cells.size() != waypoints.size() || rsrps.size() != waypoints.size()) {
    throw ValidationError("trajectory columns have different lengths");
  }
  for (std::size_t k = 1; k < waypoints.size(); ++k) {
    const int di = std::abs(waypoints[k].i - waypoints[k - 1].i);
    const int dj = std::abs(waypoints[k].j - waypoints[k - 1].j);
    if (di > 1 || dj > 1 || di + dj == 0) {
      throw ValidationError("trajectory step " + std::to_string(k) + " is not an 8-neighbour move");
    }
  }
}

std::uint8_t legal_directions(GridPoint p, int grid_size) {
  std::uint8_t mask = 0;
  for (int d = 0; d < kNumDirections; ++d) {
    const auto o = kDirectionOffsets[static_cast<std::size_t>(d)];
    const int i = p.i + o.di;
    const int j = p.j + o.dj;
    if (i >= 0 && j >= 0 && i < grid_size && j < grid_size) mask |= std::uint8_t(1u << d);
  }
  return mask;
}

State initial_state(GridPoint start, const radio::RadioMap& map) {
  return {start, map.strongest(start).cell_id, 0};
}

State step(const State& state, const Action& action, const radio::RadioMap& map) {
  const GridPoint next = moved(state.position, action.direction);
  if (!map.grid().contains(next)) {
    throw ValidationError(std::string("move ") + direction_name(action.direction) +
                          " leaves the grid");
  }
  if (action.cell_rank < 0 || action.cell_rank >= map.candidates()) {
    throw ValidationError("cell rank out of range");
  }
  return {next, map.at(next, action.cell_rank).cell_id, action.cell_rank};
}

double reward_terms(bool diagonal, bool handoff, bool covered, const Weights& w) {
  const double motion = diagonal ? -1.0 : -1.0 / std::numbers::sqrt2;
  const double signal = covered ? 0.0 : -1.0;
  const double ho = handoff ? -1.0 : 0.0;
  return w.energy * motion + w.signal * signal + w.handoff * ho;
}

double reward(const State& prev, const State& next, const radio::RadioMap& map,
              const Weights& weights, double threshold_dbm) {
  const bool diagonal = prev.position.i != next.position.i && prev.position.j != next.position.j;
  const bool handoff = prev.serving_cell != next.serving_cell;
  const bool covered =
      radio::is_covered(map.at(next.position, next.serving_rank).rsrp_dbm, threshold_dbm);
  return reward_terms(diagonal, handoff, covered, weights);
}

// ---------------------------------------------------------------------------
// QTable

QTable::QTable(int grid_size, int ranks, StateMode mode)
    : grid_size_(grid_size), ranks_(ranks), mode_(mode) {
  if (grid_size < 1 || ranks < 1) throw ValidationError("bad Q-table dimensions");
  const std::size_t states = static_cast<std::size_t>(grid_size) * grid_size *
                             (mode == StateMode::kPositionAndCell ? ranks : 1);
  values_.assign(states * static_cast<std::size_t>(num_actions()), 0.0);
}

std::size_t QTable::offset(const State& s) const {
  std::size_t state = static_cast<std::size_t>(s.position.j) * grid_size_ + s.position.i;
  if (mode_ == StateMode::kPositionAndCell) {
    state = state * static_cast<std::size_t>(ranks_) + static_cast<std::size_t>(s.serving_rank);
  }
  return state * width();
}

std::vector<std::size_t> QTable::shape() const {
  const auto j = static_cast<std::size_t>(grid_size_);
  const auto r = static_cast<std::size_t>(ranks_);
  if (mode_ == StateMode::kPositionAndCell) return {j, j, r, kNumDirections, r};
  return {j, j, kNumDirections, r};
}

double QTable::max_legal(const State& s) const {
  const auto values = row(s);
  const auto mask = legal_directions(s.position, grid_size_);
  double best = -std::numeric_limits<double>::infinity();
  for (int d = 0; d < kNumDirections; ++d) {
    if (!(mask & (1u << d))) continue;
    for (int r = 0; r < ranks_; ++r) best = std::max(best, values[d * ranks_ + r]);
  }
  return best;
}

double q_update(QTable& q, const State& s, const Action& a, double reward,
                const State& next, double alpha, double beta) {
  const double target = reward + beta * q.max_legal(next);
  double& value = q.at(s, a);
  value = (1.0 - alpha) * value + alpha * target;
  return value;
}

Action greedy_action(const QTable& q, const State& s) {
  const auto values = q.row(s);
  const int ranks = q.ranks();
  const auto mask = legal_directions(s.position, q.grid_size());
  int best = -1;
  double best_value = -std::numeric_limits<double>::infinity();
  for (int d = 0; d < kNumDirections; ++d) {
    if (!(mask & (1u << d))) continue;
    for (int r = 0; r < ranks; ++r) {
      const int a = d * ranks + r;
      if (best < 0 || values[a] > best_value) {
        best = a;
        best_value = values[a];
      }
    }
  }
  if (best < 0) throw InfeasibleError("no legal action");
  return action_from_index(best, ranks);
}

Action select_action(const QTable& q, const State& s, double epsilon, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double kappa = unit(rng);
  if (kappa >= epsilon) return greedy_action(q, s);

  const auto mask = legal_directions(s.position, q.grid_size());
  const int legal = std::popcount(mask);
  if (legal == 0) throw InfeasibleError("no legal action");
  std::uniform_int_distribution<int> pick(0, legal * q.ranks() - 1);
  const int k = pick(rng);
  int nth = k / q.ranks();
  for (int d = 0; d < kNumDirections; ++d) {
    if (!(mask & (1u << d))) continue;
    if (nth-- == 0) return {static_cast<Direction>(d), k % q.ranks()};
  }
  throw InfeasibleError("no legal action");
}

// ---------------------------------------------------------------------------
// Training

int resolve_max_steps(const Scenario& scenario) {
  return scenario.rl.max_steps_per_episode > 0 ? scenario.rl.max_steps_per_episode
                                               : 8 * scenario.grid.size;
}

double resolve_epsilon_decay(const Scenario& scenario) {
  const auto& rl = scenario.rl;
  if (rl.epsilon_decay > 0.0) return rl.epsilon_decay;
  // Every episode takes at least the octile step count, so epsilon reaches
  // its floor within the first 70% of episodes.
  const int min_steps = std::max(std::abs(scenario.goal.i - scenario.start.i),
                                 std::abs(scenario.goal.j - scenario.start.j));
  const double actions = 0.7 * rl.max_episodes * std::max(min_steps, 1);
  return (rl.epsilon_start - rl.epsilon_min) / actions;
}

namespace {

double step_energy(const Scenario& s, bool diagonal) {
  const double d = diagonal ? s.grid.step * std::numbers::sqrt2 : s.grid.step;
  return energy::segment_energy(s.speed, d, s.power);
}

void check_map(const Scenario& scenario, const radio::RadioMap& map) {
  if (map.grid().size != scenario.grid.size || map.grid().step != scenario.grid.step) {
    throw ValidationError("radio map grid does not match the scenario");
  }
  if (!map.grid().contains(scenario.start) || !map.grid().contains(scenario.goal)) {
    throw ValidationError("start or goal outside the radio map");
  }
}

}  // namespace

TrainResult train(const Scenario& scenario, const radio::RadioMap& map) {
  scenario.rl.validate();
  scenario.weights.validate();
  check_map(scenario, map);

  const auto& rl = scenario.rl;
  const double budget = energy::available_energy(scenario.budget(), scenario.power);
  const double e_cardinal = step_energy(scenario, false);
  const double e_diagonal = step_energy(scenario, true);

  TrainResult result;
  result.q = QTable(scenario.grid.size, map.candidates(), rl.state_mode);
  result.epsilon_decay = resolve_epsilon_decay(scenario);
  result.max_steps = resolve_max_steps(scenario);
  result.log.reserve(static_cast<std::size_t>(rl.max_episodes));

  QTable& q = result.q;
  Rng rng(rl.seed);
  double epsilon = rl.epsilon_start;
  bool have_best = false;
  int reached = 0;
  int over_budget = 0;
  Trajectory episode;

  for (int ep = 0; ep < rl.max_episodes; ++ep) {
    State s = initial_state(scenario.start, map);
    episode.waypoints.clear();
    episode.cells.clear();
    episode.rsrps.clear();
    episode.push_back(s.position, s.serving_cell, map.at(s.position, 0).rsrp_dbm);

    EpisodeLog entry;
    entry.episode = ep;
    double energy_used = 0.0;
    bool goal = false;
    bool within_budget = true;

    for (int t = 0; t < result.max_steps; ++t) {
      const Action a = select_action(q, s, epsilon, rng);
      const State next = step(s, a, map);
      const double r = reward(s, next, map, scenario.weights, scenario.rsrp_threshold_dbm);
      q_update(q, s, a, r, next, rl.learning_rate, rl.discount);
      epsilon = std::max(rl.epsilon_min, epsilon - result.epsilon_decay);

      energy_used += is_cardinal(a.direction) ? e_cardinal : e_diagonal;
      entry.cumulative_reward += r;
      ++entry.steps;
      episode.push_back(next.position, next.serving_cell,
                        map.at(next.position, next.serving_rank).rsrp_dbm);
      s = next;

      if (s.position == scenario.goal) {
        goal = true;
        break;
      }
      if (energy_used > budget) {
        within_budget = false;
        break;
      }
    }

    entry.reached_goal = goal;
    entry.energy_j = energy_used;
    entry.epsilon = epsilon;
    result.log.push_back(entry);
    if (goal) ++reached;
    if (!within_budget) ++over_budget;

    if (goal && within_budget) {
      ++result.feasible_episodes;
      if (!have_best || entry.cumulative_reward > result.best_reward) {
        have_best = true;
        result.best = episode;
        result.best_reward = entry.cumulative_reward;
        result.best_episode = ep;
      }
    }
  }

  // The final greedy policy competes with the recorded episodes.
  try {
    Trajectory greedy = rollout(q, scenario, map);
    double total = 0.0;
    double used = 0.0;
    for (std::size_t k = 1; k < greedy.size(); ++k) {
      const bool diagonal = greedy.waypoints[k].i != greedy.waypoints[k - 1].i &&
                            greedy.waypoints[k].j != greedy.waypoints[k - 1].j;
      total += reward_terms(diagonal, greedy.cells[k] != greedy.cells[k - 1],
                            radio::is_covered(greedy.rsrps[k], scenario.rsrp_threshold_dbm),
                            scenario.weights);
      used += diagonal ? e_diagonal : e_cardinal;
    }
    if (used <= budget && (!have_best || total > result.best_reward)) {
      have_best = true;
      result.best = std::move(greedy);
      result.best_reward = total;
      result.best_episode = -1;
    }
  } catch (const RolloutError&) {
  }

  if (!have_best) {
    std::ostringstream msg;
    msg << "no feasible episode in " << rl.max_episodes << " episodes (" << reached
        << " reached the goal, " << over_budget << " exceeded the energy budget of " << budget
        << " J, step cap " << result.max_steps << "); greedy rollout also failed";
    throw InfeasibleError(msg.str());
  }
  return result;
}

Trajectory rollout(const QTable& q, const Scenario& scenario, const radio::RadioMap& map,
                   int max_steps) {
  check_map(scenario, map);
  const std::size_t per_point =
      q.mode() == StateMode::kPositionAndCell ? static_cast<std::size_t>(q.ranks()) : 1;
  std::vector<char> visited(scenario.grid.num_points() * per_point, 0);
  if (max_steps <= 0) max_steps = static_cast<int>(visited.size());

  State s = initial_state(scenario.start, map);
  Trajectory t;
  t.push_back(s.position, s.serving_cell, map.at(s.position, 0).rsrp_dbm);
  for (int k = 0; k < max_steps; ++k) {
    if (s.position == scenario.goal) return t;
    std::size_t key = scenario.grid.index(s.position) * per_point;
    if (per_point > 1) key += static_cast<std::size_t>(s.serving_rank);
    if (visited[key]) {
      throw RolloutError("greedy rollout revisits (" + std::to_string(s.position.i) + "," +
                         std::to_string(s.position.j) + ") after " + std::to_string(k) +
                         " steps");
    }
    visited[key] = 1;
    s = step(s, greedy_action(q, s), map);
    t.push_back(s.position, s.serving_cell, map.at(s.position, s.serving_rank).rsrp_dbm);
  }
  if (s.position == scenario.goal) return t;
  throw RolloutError("greedy rollout hit the step cap of " + std::to_string(max_steps));
}

// ---------------------------------------------------------------------------
// Files

namespace {

constexpr char kQMagic[8] = {'U', 'A', 'V', 'Q', 'T', 'A', 'B', '1'};
constexpr std::uint32_t kQVersion = 1;

template <typename T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw IoError("truncated Q-table file");
  return v;
}

}  // namespace

void write_qtable(const QTable& q, std::uint64_t seed, int episodes, std::ostream& out) {
  out.write(kQMagic, sizeof kQMagic);
  put(out, kQVersion);
  put(out, static_cast<std::uint32_t>(q.mode() == StateMode::kPositionAndCell ? 1 : 0));
  put(out, static_cast<std::int32_t>(q.grid_size()));
  put(out, static_cast<std::int32_t>(q.ranks()));
  put(out, seed);
  put(out, static_cast<std::int32_t>(episodes));
  put(out, static_cast<std::uint64_t>(q.values().size()));
  out.write(reinterpret_cast<const char*>(q.values().data()),
            static_cast<std::streamsize>(q.values().size() * sizeof(double)));
  if (!out) throw IoError("failed to write Q-table");
}

QTableFile read_qtable(std::istream& in) {
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kQMagic, sizeof kQMagic) != 0) throw IoError("not a Q-table file");
  if (get<std::uint32_t>(in) != kQVersion) throw IoError("unsupported Q-table version");
  const auto mode = get<std::uint32_t>(in) ? StateMode::kPositionAndCell : StateMode::kPosition;
  const int size = get<std::int32_t>(in);
  const int ranks = get<std::int32_t>(in);
  QTableFile file;
  file.seed = get<std::uint64_t>(in);
  file.episodes = get<std::int32_t>(in);
  const auto count = get<std::uint64_t>(in);
  if (size < 1 || size > 100000 || ranks < 1 || ranks > 4096) throw IoError("corrupt Q-table header");
  file.q = QTable(size, ranks, mode);
  if (count != file.q.values().size()) throw IoError("Q-table size does not match its shape");
  in.read(reinterpret_cast<char*>(file.q.values().data()),
          static_cast<std::streamsize>(count * sizeof(double)));
  if (!in) throw IoError("truncated Q-table file");
  return file;
}

void save_qtable(const QTable& q, std::uint64_t seed, int episodes,
                 const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  write_qtable(q, seed, episodes, out);
}

QTableFile load_qtable(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_qtable(in);
}

void write_training_log(std::span<const EpisodeLog> log, std::ostream& out) {
  out << "episode,cumulative_reward,steps,reached_goal,energy_J\n" << std::setprecision(12);
  for (const auto& e : log) {
    out << e.episode << ',' << e.cumulative_reward << ',' << e.steps << ','
        << (e.reached_goal ? 1 : 0) << ',' << e.energy_j << '\n';
  }
}

void write_trajectory_csv(const Trajectory& t, const GridSpec& grid, std::ostream& out) {
  out << "step,i,j,x_m,y_m,cell_id,rsrp_dbm\n" << std::setprecision(17);
  for (std::size_t k = 0; k < t.size(); ++k) {
    const auto pos = grid_to_coords(t.waypoints[k], grid);
    out << k << ',' << t.waypoints[k].i << ',' << t.waypoints[k].j << ',' << pos.x << ','
        << pos.y << ',' << t.cells[k] << ',' << t.rsrps[k] << '\n';
  }
}

Trajectory read_trajectory_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("step,i,j", 0) != 0) {
    throw IoError("not a trajectory CSV");
  }
  Trajectory t;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(row, field, ',')) fields.push_back(field);
    if (fields.size() != 7) throw IoError("bad trajectory row: " + line);
    try {
      t.push_back({std::stoi(fields[1]), std::stoi(fields[2])}, std::stoi(fields[5]),
                  std::stod(fields[6]));
    } catch (const std::exception&) {
      throw IoError("bad trajectory row: " + line);
    }
  }
  return t;
}

}  // namespace uavplan::planner
