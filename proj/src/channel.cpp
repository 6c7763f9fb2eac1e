#include "uavplan/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace uavplan::radio {

namespace {

constexpr double kSpeedOfLight = 299792458.0;
constexpr double kDeg = std::numbers::pi / 180.0;

double wrap_degrees(double a) {
  a = std::fmod(a + 180.0, 360.0);
  if (a < 0.0) a += 360.0;
  return a - 180.0;
}

// Attenuation (dB, >= 0) of a uniform linear array steered to
// `steer_elev_rad`, normalised to 0 dB at the steering direction.
double array_attenuation(double elev_rad, double steer_elev_rad,
                         const ChannelParams& p) {
  const int n = p.vertical_elements;
  if (n <= 1) return 0.0;
  const double psi = 2.0 * std::numbers::pi * p.element_spacing_wl *
                     (std::sin(elev_rad) - std::sin(steer_elev_rad));
  const double den = n * std::sin(psi / 2.0);
  if (std::abs(den) < 1e-12) return 0.0;
  const double af = std::abs(std::sin(n * psi / 2.0) / den);
  if (af <= 0.0) return p.max_attenuation_db;
  return std::min(-20.0 * std::log10(af), p.max_attenuation_db);
}

}  // namespace

void ChannelParams::validate() const {
  if (!(carrier_freq_hz > 0.0)) throw ValidationError("carrier frequency must be positive");
  if (vertical_elements < 1) throw ValidationError("need at least one array element");
  if (!(h_beamwidth_deg > 0.0) || !(v_beamwidth_deg > 0.0)) {
    throw ValidationError("beamwidths must be positive");
  }
  if (max_attenuation_db < 0.0 || v_sidelobe_db < 0.0) {
    throw ValidationError("attenuation limits must be non-negative");
  }
  if (!(element_spacing_wl > 0.0)) throw ValidationError("element spacing must be positive");
}

double peak_gain(const ChannelParams& params) {
  return params.element_gain_dbi + 10.0 * std::log10(params.vertical_elements);
}

double antenna_gain(const Cell& cell, const Vec3& target,
                    const ChannelParams& params) {
  const double dx = target.x - cell.bs_position.x;
  const double dy = target.y - cell.bs_position.y;
  const double dz = target.z - cell.bs_position.z;
  const double d2 = std::hypot(dx, dy);
  if (d2 == 0.0 && dz == 0.0) {
    throw ValidationError("antenna gain undefined at the antenna position");
  }

  const double azimuth = d2 > 0.0 ? std::atan2(dy, dx) / kDeg : cell.azimuth_deg;
  const double phi = wrap_degrees(azimuth - cell.azimuth_deg);
  const double elev = std::atan2(dz, d2) / kDeg;
  const double theta = elev + cell.downtilt_deg;  // 0 on boresight

  const double att_h = std::min(12.0 * std::pow(phi / params.h_beamwidth_deg, 2),
                                params.max_attenuation_db);
  const double att_v = std::min(12.0 * std::pow(theta / params.v_beamwidth_deg, 2),
                                params.v_sidelobe_db);
  const double att_af = array_attenuation(elev * kDeg, -cell.downtilt_deg * kDeg, params);

  const double att = std::min(att_h + att_v + att_af, params.max_attenuation_db);
  return peak_gain(params) - att;
}

double los_probability(double d2d, double uav_height,
                       const ChannelParams& p) {
  const double h = uav_height;
  if (h > p.los_full_height) return 1.0;

  if (h <= p.los_terrestrial_max_height) {
    const double d1 = p.los_terrestrial_d1;
    if (d2d <= d1) return 1.0;
    const double base = d1 / d2d + std::exp(-d2d / p.los_terrestrial_p1) * (1.0 - d1 / d2d);
    const double c = h <= 13.0 ? 0.0 : std::pow((h - 13.0) / 10.0, 1.5);
    const double boost =
        1.0 + c * 1.25 * std::pow(d2d / 100.0, 3) * std::exp(-d2d / 150.0);
    return std::clamp(base * boost, 0.0, 1.0);
  }

  const double lh = std::log10(h);
  const double d1 = std::max(p.los_aerial_d1_slope * lh + p.los_aerial_d1_offset,
                             p.los_aerial_d1_min);
  if (d2d <= d1) return 1.0;
  const double p1 = p.los_aerial_p1_slope * lh + p.los_aerial_p1_offset;
  return std::clamp(d1 / d2d + std::exp(-d2d / p1) * (1.0 - d1 / d2d), 0.0, 1.0);
}

double free_space_loss(double d, double carrier_freq_hz) {
  return 20.0 * std::log10(4.0 * std::numbers::pi * d * carrier_freq_hz / kSpeedOfLight);
}

double los_pathloss(double d3d, const ChannelParams& params) {
  return free_space_loss(d3d, params.carrier_freq_hz) + params.los_excess_db;
}

double nlos_pathloss(double d3d, double uav_height,
                     const ChannelParams& p) {
  const double h = std::clamp(uav_height, p.nlos_min_height, p.nlos_max_height);
  const double fc_ghz = p.carrier_freq_hz / 1e9;
  const double nlos = p.nlos_intercept_db +
                      (p.nlos_exponent_base - p.nlos_exponent_height * std::log10(h)) *
                          std::log10(d3d) +
                      20.0 * std::log10(40.0 * std::numbers::pi * fc_ghz / 3.0);
  return std::max(nlos, los_pathloss(d3d, p));
}

double mean_pathloss(const Cell& cell, const Vec3& target,
                     const ChannelParams& params) {
  const double dx = target.x - cell.bs_position.x;
  const double dy = target.y - cell.bs_position.y;
  const double dz = target.z - cell.bs_position.z;
  const double d2 = std::hypot(dx, dy);
  const double d3 = std::hypot(d2, dz);
  if (d3 <= 0.0) throw ValidationError("pathloss undefined at zero distance");

  const double p_los = los_probability(d2, target.z, params);
  const double l_los = los_pathloss(d3, params);
  if (p_los >= 1.0) return l_los;
  return p_los * l_los + (1.0 - p_los) * nlos_pathloss(d3, target.z, params);
}

double rsrp(const Cell& cell, const Vec3& target, const ChannelParams& params) {
  return cell.tx_power_dbm + antenna_gain(cell, target, params) -
         mean_pathloss(cell, target, params);
}

}  // namespace uavplan::radio
