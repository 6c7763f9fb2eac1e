#include "uavplan/types.hpp"

#include <cmath>
#include <sstream>
#include <vector>

namespace uavplan {

void GridSpec::validate() const {
  if (!(step > 0.0)) throw ValidationError("grid step must be positive");
  if (size < 2) throw ValidationError("grid needs at least 2 points per axis");
  if (!(altitude > 0.0)) throw ValidationError("altitude must be positive");
}

Vec3 grid_to_coords(GridPoint p, const GridSpec& grid) {
  if (!grid.contains(p)) {
    throw ValidationError("grid index (" + std::to_string(p.i) + "," +
                          std::to_string(p.j) + ") out of range");
  }
  return {grid.origin.x + p.i * grid.step, grid.origin.y + p.j * grid.step,
          grid.altitude};
}

GridPoint coords_to_grid(const Vec3& position, const GridSpec& grid) {
  const GridPoint p{
      static_cast<int>(std::lround((position.x - grid.origin.x) / grid.step)),
      static_cast<int>(std::lround((position.y - grid.origin.y) / grid.step))};
  if (!grid.contains(p)) throw ValidationError("position lies off the grid");
  return p;
}

const char* direction_name(Direction d) {
  static constexpr const char* kNames[] = {"E", "W", "N", "S", "NE", "NW", "SE", "SW"};
  return kNames[static_cast<int>(d)];
}

void Weights::validate() const {
  if (energy < 0.0 || signal < 0.0 || handoff < 0.0) {
    throw ValidationError("weights must be non-negative");
  }
  const double sum = energy + signal + handoff;
  if (std::abs(sum - 1.0) > 1e-9) {
    std::ostringstream msg;
    msg << "weights must sum to 1 (got " << sum << ")";
    throw ValidationError(msg.str());
  }
}

Weights parse_weights(const std::string& text) {
  std::vector<double> parts;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationError("cannot parse weight '" + item + "'");
    }
  }
  if (parts.size() != 3) {
    throw ValidationError("weights need three values: en,sig,ho");
  }
  Weights w{parts[0], parts[1], parts[2]};
  w.validate();
  return w;
}

}  // namespace uavplan
