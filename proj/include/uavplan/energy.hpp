#pragma once

#include <span>

#include "uavplan/types.hpp"

namespace uavplan::energy {

// Rotary-wing propulsion model parameters.
struct PowerParams {
  double blade_profile_power = 79.86;  // P0, W
  double induced_power = 88.63;        // Pi, W
  double tip_speed = 120.0;            // U_tip, m/s
  double mean_induced_velocity = 4.03; // v0, m/s
  double fuselage_drag_ratio = 0.6;    // d0
  double air_density = 1.225;          // kg/m^3
  double rotor_solidity = 0.05;
  double rotor_disc_area = 0.503;      // m^2

  void validate() const;
};

struct EnergyBudget {
  double capacity = 2.5e6;  // E_C, J
  double reserve = 0.0;     // E_S, J
  double speed = 30.0;      // m/s
  double altitude = 80.0;   // m

  void validate() const;
};

// Propulsion power at horizontal speed v (W):
// blade profile P0 (1 + 3 v^2 / U_tip^2)
// + induced Pi (sqrt(1 + v^4 / (4 v0^4)) - v^2 / (2 v0^2))^(1/2)
// + parasite 0.5 d0 rho s A v^3.
double propulsion_power(double v, const PowerParams& params);

// Energy to fly distance d at speed v > 0 (J).
double segment_energy(double v, double d, const PowerParams& params);

// E_C - E_S - 2 E(v, h). Throws InfeasibleError when not positive.
double available_energy(const EnergyBudget& budget, const PowerParams& params);

// Sum of segment energies over consecutive waypoints (J).
double mission_energy(std::span<const Vec3> waypoints, double v,
                      const PowerParams& params);

}  // namespace uavplan::energy
