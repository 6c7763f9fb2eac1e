#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "uavplan/scenario.hpp"

namespace uavplan::radio {

struct Candidate {
  int cell_id = 0;
  double rsrp_dbm = 0.0;
};

// Per grid point, the M' strongest cells in descending RSRP order
// (ties: lower cell id first). Dense, row-major, immutable once built.
class RadioMap {
 public:
  RadioMap() = default;
  RadioMap(GridSpec grid, int candidates, int num_cells,
           std::vector<Candidate> data, std::uint64_t scenario_digest = 0);

  const GridSpec& grid() const { return grid_; }
  int candidates() const { return candidates_; }
  int num_cells() const { return num_cells_; }
  std::uint64_t scenario_digest() const { return scenario_digest_; }

  std::span<const Candidate> at(GridPoint p) const {
    return {data_.data() + grid_.index(p) * static_cast<std::size_t>(candidates_),
            static_cast<std::size_t>(candidates_)};
  }
  const Candidate& at(GridPoint p, int rank) const {
    return data_[grid_.index(p) * static_cast<std::size_t>(candidates_) +
                 static_cast<std::size_t>(rank)];
  }
  const Candidate& strongest(GridPoint p) const { return at(p, 0); }

  // Rank of cell_id at p, or -1 when it is not among the candidates.
  int rank_of(GridPoint p, int cell_id) const;

  std::span<const Candidate> data() const { return data_; }

  // Map restricted to the first `candidates` ranks.
  RadioMap truncated(int candidates) const;

  // Fraction of grid points whose strongest RSRP meets the threshold.
  double coverage_fraction(double threshold_dbm) const;

  // FNV-1a over the candidate records.
  std::uint64_t payload_checksum() const;

  friend bool operator==(const RadioMap& a, const RadioMap& b);

 private:
  GridSpec grid_;
  int candidates_ = 0;
  int num_cells_ = 0;
  std::vector<Candidate> data_;
  std::uint64_t scenario_digest_ = 0;
};

// Builds the map at the scenario's altitude, grid points evaluated in
// parallel. Throws ValidationError unless 1 <= M' <= M.
RadioMap build_radio_map(const Scenario& scenario, int candidates);

// Single-threaded reference producing an identical map.
RadioMap build_radio_map_serial(const Scenario& scenario, int candidates);

// Throws ValidationError unless `map` was built from `scenario`'s cells,
// channel and grid (altitude included).
void require_match(const Scenario& scenario, const RadioMap& map);

// Ranks all cells at one point; exposed for the map builders and tests.
void rank_cells(const Scenario& scenario, GridPoint p,
                std::span<Candidate> all_cells);

// Binary container: magic "UAVRMAP1", version, J, step, origin, h, M', M,
// scenario digest, payload checksum, then J*J*M' (int32 id, float64 rsrp)
// records in row-major order. Little-endian.
void write_radio_map(const RadioMap& map, std::ostream& out);
RadioMap read_radio_map(std::istream& in);
void save_radio_map(const RadioMap& map, const std::filesystem::path& path);
RadioMap load_radio_map(const std::filesystem::path& path);

// CSV rows: i,j,rank,cell_id,rsrp_dbm.
void write_candidates_csv(const RadioMap& map, std::ostream& out);

// CSV rows: i,j,x_m,y_m,max_rsrp_dbm,cell_id.
void write_heatmap_csv(const RadioMap& map, std::ostream& out);

}  // namespace uavplan::radio
