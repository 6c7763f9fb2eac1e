#pragma once

#include "uavplan/types.hpp"

namespace uavplan::radio {

// Air-to-ground channel and base-station antenna parameters.
//
// Pathloss follows the 3GPP urban-macro aerial family: a height-dependent
// LoS probability, a free-space LoS limb plus a fixed excess loss, and an
// NLoS limb whose distance exponent shrinks with UAV height. The NLoS limb
// is floored at the LoS limb. The antenna is a sector element pattern
// (horizontal/vertical parabolic cuts) combined with a uniform vertical
// array steered to the downtilt; total attenuation is clamped at
// max_attenuation_db below the peak.
struct ChannelParams {
  double carrier_freq_hz = 1.8e9;

  // LoS probability.
  double los_terrestrial_max_height = 22.5;  // m; terrestrial UMa form below
  double los_full_height = 100.0;            // m; P_LoS = 1 above
  double los_terrestrial_d1 = 18.0;          // m
  double los_terrestrial_p1 = 63.0;          // m
  double los_aerial_d1_slope = 460.0;        // d1 = max(a log10 h + b, d1_min)
  double los_aerial_d1_offset = -700.0;
  double los_aerial_d1_min = 18.0;
  double los_aerial_p1_slope = 4300.0;       // p1 = a log10 h + b
  double los_aerial_p1_offset = -3800.0;

  // Pathloss.
  double los_excess_db = 1.0;
  double nlos_intercept_db = -17.5;
  double nlos_exponent_base = 46.0;    // dB/decade at 1 m height
  double nlos_exponent_height = 7.0;   // dB/decade reduction per log10(h)
  double nlos_min_height = 10.0;       // m; clamp for the exponent term
  double nlos_max_height = 100.0;

  // Antenna.
  double element_gain_dbi = 8.0;
  double h_beamwidth_deg = 65.0;
  double v_beamwidth_deg = 10.0;
  double max_attenuation_db = 30.0;  // front-to-back and overall floor
  double v_sidelobe_db = 30.0;
  int vertical_elements = 8;
  double element_spacing_wl = 0.5;  // wavelengths

  void validate() const;
};

// Peak antenna gain (element + array gain), dBi.
double peak_gain(const ChannelParams& params);

// Antenna gain of `cell` towards `target`, dBi. Throws on coincident points.
double antenna_gain(const Cell& cell, const Vec3& target,
                    const ChannelParams& params);

// LoS probability at horizontal distance d2d for a UAV at height uav_height.
double los_probability(double d2d, double uav_height,
                       const ChannelParams& params);

// Free-space pathloss at 3D distance d (m), dB.
double free_space_loss(double d, double carrier_freq_hz);

double los_pathloss(double d3d, const ChannelParams& params);
double nlos_pathloss(double d3d, double uav_height,
                     const ChannelParams& params);

// Expected pathloss P_LoS L_LoS + (1 - P_LoS) L_NLoS, dB.
double mean_pathloss(const Cell& cell, const Vec3& target,
                     const ChannelParams& params);

// RSRP = P_T + G - L, dBm.
double rsrp(const Cell& cell, const Vec3& target, const ChannelParams& params);

// Coverage test; the threshold itself counts as covered.
inline bool is_covered(double rsrp_dbm, double threshold_dbm) {
  return rsrp_dbm >= threshold_dbm;
}

}  // namespace uavplan::radio
