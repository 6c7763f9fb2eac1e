#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace uavplan {

// Error categories. The CLI maps them onto exit codes 2, 3 and 4.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

// Integer grid index; i runs along x, j along y.
struct GridPoint {
  int i = 0;
  int j = 0;

  friend auto operator<=>(const GridPoint&, const GridPoint&) = default;
};

// Square horizontal grid at a fixed flight altitude.
struct GridSpec {
  Vec2 origin;
  double step = 20.0;    // m
  int size = 151;        // points per axis (J)
  double altitude = 80;  // m

  double side() const { return (size - 1) * step; }
  std::size_t num_points() const {
    return static_cast<std::size_t>(size) * static_cast<std::size_t>(size);
  }
  bool contains(GridPoint p) const {
    return p.i >= 0 && p.j >= 0 && p.i < size && p.j < size;
  }
  // Row-major flat index (j major, i minor).
  std::size_t index(GridPoint p) const {
    return static_cast<std::size_t>(p.j) * static_cast<std::size_t>(size) +
           static_cast<std::size_t>(p.i);
  }
  GridPoint point(std::size_t flat) const {
    return {static_cast<int>(flat % static_cast<std::size_t>(size)),
            static_cast<int>(flat / static_cast<std::size_t>(size))};
  }

  void validate() const;
};

// Returns the 3D position of a grid point at the grid's altitude.
Vec3 grid_to_coords(GridPoint p, const GridSpec& grid);

// Inverse of grid_to_coords. Snaps to the nearest grid point and throws
// ValidationError when the result lies off the grid.
GridPoint coords_to_grid(const Vec3& position, const GridSpec& grid);

// Eight-connected motion directions, in action-index order.
enum class Direction : std::uint8_t { E, W, N, S, NE, NW, SE, SW };

inline constexpr int kNumDirections = 8;

struct Offset {
  int di;
  int dj;
};

inline constexpr std::array<Offset, kNumDirections> kDirectionOffsets{{
    {1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {-1, 1}, {1, -1}, {-1, -1}}};

inline constexpr Offset offset(Direction d) {
  return kDirectionOffsets[static_cast<std::size_t>(d)];
}

inline constexpr bool is_cardinal(Direction d) {
  return static_cast<int>(d) < 4;
}

inline constexpr GridPoint moved(GridPoint p, Direction d) {
  const auto o = offset(d);
  return {p.i + o.di, p.j + o.dj};
}

const char* direction_name(Direction d);

// One sector of a base station.
struct Cell {
  int id = 0;
  Vec3 bs_position;           // m, z includes mast height
  double azimuth_deg = 0.0;   // boresight, counter-clockwise from +x
  double downtilt_deg = 6.0;  // below horizon
  double tx_power_dbm = 37.0;
};

// Objective weights (w_en, w_sig, w_ho).
struct Weights {
  double energy = 0.025;
  double signal = 0.90;
  double handoff = 0.075;

  // Throws ValidationError unless all weights are non-negative and sum to 1.
  void validate() const;
};

// Parses "en,sig,ho" into Weights (validated).
Weights parse_weights(const std::string& text);

}  // namespace uavplan
