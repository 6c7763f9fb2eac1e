#include "uavplan/energy.hpp"

#include <cmath>

namespace uavplan::energy {

void PowerParams::validate() const {
  if (!(blade_profile_power > 0 && induced_power > 0 && tip_speed > 0 &&
        mean_induced_velocity > 0 && fuselage_drag_ratio > 0 && air_density > 0 &&
        rotor_solidity > 0 && rotor_disc_area > 0)) {
    throw ValidationError("power parameters must all be positive");
  }
}

void EnergyBudget::validate() const {
  if (!(reserve >= 0.0)) throw ValidationError("energy reserve must be non-negative");
  if (!(capacity > reserve)) throw ValidationError("energy capacity must exceed the reserve");
  if (!(speed > 0.0)) throw ValidationError("speed must be positive");
  if (altitude < 0.0) throw ValidationError("altitude must be non-negative");
}

double propulsion_power(double v, const PowerParams& p) {
  if (!(v >= 0.0)) throw ValidationError("speed must be non-negative");
  const double v2 = v * v;
  const double profile = p.blade_profile_power * (1.0 + 3.0 * v2 / (p.tip_speed * p.tip_speed));
  // sqrt(1 + x^2) - x with x = v^2 / (2 v0^2), written to avoid cancellation.
  const double x = v2 / (2.0 * p.mean_induced_velocity * p.mean_induced_velocity);
  const double induced = p.induced_power * std::sqrt(1.0 / (std::sqrt(1.0 + x * x) + x));
  const double parasite = 0.5 * p.fuselage_drag_ratio * p.air_density * p.rotor_solidity *
                          p.rotor_disc_area * v2 * v;
  return profile + induced + parasite;
}

double segment_energy(double v, double d, const PowerParams& params) {
  if (!(v > 0.0)) throw ValidationError("segment energy needs a positive speed");
  if (d < 0.0) throw ValidationError("segment length must be non-negative");
  return propulsion_power(v, params) * d / v;
}

double available_energy(const EnergyBudget& budget, const PowerParams& params) {
  const double vertical = budget.altitude > 0.0
                              ? 2.0 * segment_energy(budget.speed, budget.altitude, params)
                              : 0.0;
  const double available = budget.capacity - budget.reserve - vertical;
  if (!(available > 0.0)) {
    throw InfeasibleError("no energy left for the horizontal mission");
  }
  return available;
}

double mission_energy(std::span<const Vec3> waypoints, double v,
                      const PowerParams& params) {
  double total = 0.0;
  for (std::size_t k = 1; k < waypoints.size(); ++k) {
    const auto& a = waypoints[k - 1];
    const auto& b = waypoints[k];
    total += segment_energy(v, std::hypot(b.x - a.x, b.y - a.y, b.z - a.z), params);
  }
  return total;
}

}  // namespace uavplan::energy
