#pragma once

#include <algorithm>
#include <random>

#include "uavplan/radio_map.hpp"
#include "uavplan/scenario.hpp"

namespace uavplan::fixtures {

// Default deployment (64 cells, 151 x 151) at altitude h.
inline Scenario default_scenario(double h = 80.0) {
  DeploymentParams p;
  p.altitude = h;
  return generate_scenario(7, p);
}

// 11 x 11 grid with three cells scattered in and around the area.
inline Scenario small_scenario(std::uint64_t seed, double h = 80.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-200.0, 400.0);
  std::uniform_real_distribution<double> azimuth(0.0, 360.0);
  Scenario s;
  s.seed = seed;
  s.grid.size = 11;
  s.grid.altitude = h;
  s.start = {0, 0};
  s.goal = {10, 10};
  s.rl.state_mode = StateMode::kPositionAndCell;
  for (int c = 0; c < 3; ++c) {
    Cell cell;
    cell.id = c;
    cell.bs_position = {coord(rng), coord(rng), 25.0};
    cell.azimuth_deg = azimuth(rng);
    s.cells.push_back(cell);
  }
  return s;
}

// Hand-placed cells on an n x n grid; RSRP is controlled through tx power.
inline Scenario tiny_scenario(int n, int cells) {
  Scenario s;
  s.grid.size = n;
  s.grid.step = 20.0;
  s.grid.altitude = 80.0;
  s.start = {0, 0};
  s.goal = {n - 1, n - 1};
  for (int c = 0; c < cells; ++c) {
    Cell cell;
    cell.id = c;
    cell.bs_position = {20.0 * (n - 1) * c / std::max(cells - 1, 1), -150.0, 25.0};
    cell.azimuth_deg = 90.0;
    s.cells.push_back(cell);
  }
  return s;
}

}  // namespace uavplan::fixtures
