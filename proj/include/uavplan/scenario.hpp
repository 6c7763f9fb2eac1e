#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "uavplan/channel.hpp"
#include "uavplan/energy.hpp"
#include "uavplan/types.hpp"

namespace uavplan {

// How the Q-table indexes states.
//   kPosition: (i, j) only; table shape J x J x 8 x M'.
//   kPositionAndCell: (i, j, serving-cell rank); shape J x J x M' x 8 x M'.
enum class StateMode { kPosition, kPositionAndCell };

const char* state_mode_name(StateMode mode);
StateMode parse_state_mode(const std::string& text);

struct TrainConfig {
  double learning_rate = 0.01;  // alpha
  double discount = 0.9;        // beta
  double epsilon_start = 0.99;
  double epsilon_min = 0.01;
  double epsilon_decay = 0.0;  // per action; 0 selects the automatic schedule
  int max_episodes = 10000;
  int max_steps_per_episode = 0;  // 0 selects 8 * J
  StateMode state_mode = StateMode::kPosition;
  std::uint64_t seed = 1;

  void validate() const;
};

struct Scenario {
  GridSpec grid;
  std::vector<Cell> cells;
  radio::ChannelParams channel;
  double rsrp_threshold_dbm = -65.0;
  Weights weights;
  GridPoint start;
  GridPoint goal;
  double speed = 30.0;              // m/s
  double energy_capacity = 2.5e6;   // E_C, J
  double energy_reserve = 0.0;      // E_S, J
  energy::PowerParams power;
  TrainConfig rl;
  std::uint64_t seed = 7;

  double energy_budget() const { return energy_capacity - energy_reserve; }
  energy::EnergyBudget budget() const {
    return {energy_capacity, energy_reserve, speed, grid.altitude};
  }
  std::size_t num_cells() const { return cells.size(); }

  void validate() const;
};

// Parameters of the synthetic base-station deployment.
struct DeploymentParams {
  double area_side = 3000.0;  // m
  double step = 20.0;         // m
  double altitude = 80.0;     // m
  int three_sector_sites = 20;
  int two_sector_sites = 2;
  double min_site_distance = 400.0;  // m
  double edge_margin = 20.0;         // m kept clear of the area boundary
  double mast_height = 25.0;         // m
  double downtilt_deg = 6.0;
  double tx_power_dbm = 37.0;
  int max_attempts = 100000;  // total rejection-sampling draws
};

// Draws a reproducible deployment; all non-deployment fields of the
// returned scenario come from `base`. Start and goal are reset to opposite
// corners unless `keep_endpoints` is set. Throws ValidationError for an
// empty deployment and InfeasibleError when placement fails.
Scenario generate_scenario(std::uint64_t seed, const DeploymentParams& params,
                           const Scenario& base = {},
                           bool keep_endpoints = false);

// Default start/goal: opposite corners of the grid.
void set_corner_endpoints(Scenario& scenario);

// JSON configuration and scenario files. A configuration may carry a
// "deployment" section instead of explicit "cells".
std::string scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(const std::string& text);

struct Config {
  Scenario scenario;
  DeploymentParams deployment;
  bool has_cells = false;
  bool has_endpoints = false;
};

Config config_from_json(const std::string& text);
Config load_config(const std::filesystem::path& path);

Scenario load_scenario(const std::filesystem::path& path);
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);

// FNV-1a 64-bit over a byte range.
std::uint64_t fnv1a64(const void* data, std::size_t size,
                      std::uint64_t seed = 14695981039346656037ull);

// Digest of everything a radio map depends on (grid geometry without the
// altitude, cells, channel).
std::uint64_t radio_digest(const Scenario& scenario);

}  // namespace uavplan
