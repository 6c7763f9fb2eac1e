#include "uavplan/radio_map.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>

namespace uavplan::radio {

static_assert(std::endian::native == std::endian::little,
              "binary containers assume a little-endian host");

RadioMap::RadioMap(GridSpec grid, int candidates, int num_cells,
                   std::vector<Candidate> data, std::uint64_t scenario_digest)
    : grid_(grid),
      candidates_(candidates),
      num_cells_(num_cells),
      data_(std::move(data)),
      scenario_digest_(scenario_digest) {
  if (candidates_ < 1 || candidates_ > num_cells_) {
    throw ValidationError("candidate count must lie in [1, M]");
  }
  if (data_.size() != grid_.num_points() * static_cast<std::size_t>(candidates_)) {
    throw ValidationError("radio map payload has the wrong size");
  }
}

int RadioMap::rank_of(GridPoint p, int cell_id) const {
  const auto row = at(p);
  for (int r = 0; r < candidates_; ++r) {
    if (row[r].cell_id == cell_id) return r;
  }
  return -1;
}

RadioMap RadioMap::truncated(int candidates) const {
  if (candidates < 1 || candidates > candidates_) {
    throw ValidationError("cannot truncate radio map to " + std::to_string(candidates) +
                          " candidates");
  }
  std::vector<Candidate> out;
  out.reserve(grid_.num_points() * static_cast<std::size_t>(candidates));
  for (std::size_t k = 0; k < grid_.num_points(); ++k) {
    const auto* row = data_.data() + k * static_cast<std::size_t>(candidates_);
    out.insert(out.end(), row, row + candidates);
  }
  return RadioMap(grid_, candidates, num_cells_, std::move(out), scenario_digest_);
}

double RadioMap::coverage_fraction(double threshold_dbm) const {
  std::size_t covered = 0;
  for (std::size_t k = 0; k < grid_.num_points(); ++k) {
    if (is_covered(data_[k * static_cast<std::size_t>(candidates_)].rsrp_dbm, threshold_dbm)) {
      ++covered;
    }
  }
  return static_cast<double>(covered) / static_cast<double>(grid_.num_points());
}

std::uint64_t RadioMap::payload_checksum() const {
  std::uint64_t h = fnv1a64(nullptr, 0);
  for (const auto& c : data_) {
    const std::int32_t id = c.cell_id;
    h = fnv1a64(&id, sizeof id, h);
    h = fnv1a64(&c.rsrp_dbm, sizeof c.rsrp_dbm, h);
  }
  return h;
}

bool operator==(const RadioMap& a, const RadioMap& b) {
  if (a.grid_.size != b.grid_.size || a.grid_.step != b.grid_.step ||
      a.grid_.altitude != b.grid_.altitude || a.grid_.origin.x != b.grid_.origin.x ||
      a.grid_.origin.y != b.grid_.origin.y || a.candidates_ != b.candidates_ ||
      a.num_cells_ != b.num_cells_ || a.scenario_digest_ != b.scenario_digest_) {
    return false;
  }
  return std::equal(a.data_.begin(), a.data_.end(), b.data_.begin(), b.data_.end(),
                    [](const Candidate& x, const Candidate& y) {
                      return x.cell_id == y.cell_id && x.rsrp_dbm == y.rsrp_dbm;
                    });
}

void rank_cells(const Scenario& scenario, GridPoint p, std::span<Candidate> all) {
  const Vec3 target = grid_to_coords(p, scenario.grid);
  for (std::size_t c = 0; c < scenario.cells.size(); ++c) {
    all[c] = {scenario.cells[c].id, rsrp(scenario.cells[c], target, scenario.channel)};
  }
  std::sort(all.begin(), all.end(), [](const Candidate& a, const Candidate& b) {
    if (a.rsrp_dbm != b.rsrp_dbm) return a.rsrp_dbm > b.rsrp_dbm;
    return a.cell_id < b.cell_id;
  });
}

namespace {

void check_candidates(const Scenario& scenario, int candidates) {
  if (candidates < 1 || candidates > static_cast<int>(scenario.cells.size())) {
    throw ValidationError("M' must lie in [1, " + std::to_string(scenario.cells.size()) +
                          "], got " + std::to_string(candidates));
  }
}

}  // namespace

RadioMap build_radio_map(const Scenario& scenario, int candidates) {
  check_candidates(scenario, candidates);
  scenario.grid.validate();
  const auto points = static_cast<std::ptrdiff_t>(scenario.grid.num_points());
  const std::size_t m = scenario.cells.size();
  const auto keep = static_cast<std::size_t>(candidates);
  std::vector<Candidate> data(scenario.grid.num_points() * keep);

#pragma omp parallel
  {
    std::vector<Candidate> scratch(m);
#pragma omp for schedule(static)
    for (std::ptrdiff_t k = 0; k < points; ++k) {
      const auto flat = static_cast<std::size_t>(k);
      rank_cells(scenario, scenario.grid.point(flat), scratch);
      std::copy_n(scratch.begin(), keep, data.begin() + static_cast<std::ptrdiff_t>(flat * keep));
    }
  }
  return RadioMap(scenario.grid, candidates, static_cast<int>(m), std::move(data),
                  radio_digest(scenario));
}

RadioMap build_radio_map_serial(const Scenario& scenario, int candidates) {
  check_candidates(scenario, candidates);
  scenario.grid.validate();
  const std::size_t m = scenario.cells.size();
  const auto keep = static_cast<std::size_t>(candidates);
  std::vector<Candidate> data;
  data.reserve(scenario.grid.num_points() * keep);
  std::vector<Candidate> scratch(m);
  for (std::size_t k = 0; k < scenario.grid.num_points(); ++k) {
    rank_cells(scenario, scenario.grid.point(k), scratch);
    data.insert(data.end(), scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(keep));
  }
  return RadioMap(scenario.grid, candidates, static_cast<int>(m), std::move(data),
                  radio_digest(scenario));
}

void require_match(const Scenario& scenario, const RadioMap& map) {
  const auto& a = scenario.grid;
  const auto& b = map.grid();
  if (map.scenario_digest() != radio_digest(scenario)) {
    throw ValidationError("radio map was built from a different scenario (digest mismatch)");
  }
  if (a.size != b.size || a.step != b.step || a.origin.x != b.origin.x ||
      a.origin.y != b.origin.y || a.altitude != b.altitude) {
    throw ValidationError("radio map grid does not match the scenario grid");
  }
}

// ---------------------------------------------------------------------------
// Binary container

namespace {

constexpr char kMagic[8] = {'U', 'A', 'V', 'R', 'M', 'A', 'P', '1'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw IoError("truncated radio map file");
  return v;
}

}  // namespace

void write_radio_map(const RadioMap& map, std::ostream& out) {
  const auto& g = map.grid();
  out.write(kMagic, sizeof kMagic);
  put(out, kVersion);
  put(out, static_cast<std::int32_t>(g.size));
  put(out, g.step);
  put(out, g.origin.x);
  put(out, g.origin.y);
  put(out, g.altitude);
  put(out, static_cast<std::int32_t>(map.candidates()));
  put(out, static_cast<std::int32_t>(map.num_cells()));
  put(out, map.scenario_digest());
  put(out, map.payload_checksum());
  for (const auto& c : map.data()) {
    put(out, static_cast<std::int32_t>(c.cell_id));
    put(out, c.rsrp_dbm);
  }
  if (!out) throw IoError("failed to write radio map");
}

RadioMap read_radio_map(std::istream& in) {
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw IoError("not a radio map file");
  }
  if (get<std::uint32_t>(in) != kVersion) throw IoError("unsupported radio map version");
  GridSpec g;
  g.size = get<std::int32_t>(in);
  g.step = get<double>(in);
  g.origin.x = get<double>(in);
  g.origin.y = get<double>(in);
  g.altitude = get<double>(in);
  const int candidates = get<std::int32_t>(in);
  const int cells = get<std::int32_t>(in);
  const auto digest = get<std::uint64_t>(in);
  const auto checksum = get<std::uint64_t>(in);
  if (g.size < 2 || g.size > 100000 || candidates < 1 || candidates > cells) {
    throw IoError("corrupt radio map header");
  }
  std::vector<Candidate> data(g.num_points() * static_cast<std::size_t>(candidates));
  for (auto& c : data) {
    c.cell_id = get<std::int32_t>(in);
    c.rsrp_dbm = get<double>(in);
  }
  RadioMap map(g, candidates, cells, std::move(data), digest);
  if (map.payload_checksum() != checksum) throw IoError("radio map checksum mismatch");
  return map;
}

void save_radio_map(const RadioMap& map, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  write_radio_map(map, out);
}

RadioMap load_radio_map(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_radio_map(in);
}

void write_candidates_csv(const RadioMap& map, std::ostream& out) {
  out << "i,j,rank,cell_id,rsrp_dbm\n" << std::setprecision(10);
  const auto& g = map.grid();
  for (std::size_t k = 0; k < g.num_points(); ++k) {
    const auto p = g.point(k);
    const auto row = map.at(p);
    for (int r = 0; r < map.candidates(); ++r) {
      out << p.i << ',' << p.j << ',' << r << ',' << row[r].cell_id << ',' << row[r].rsrp_dbm
          << '\n';
    }
  }
}

void write_heatmap_csv(const RadioMap& map, std::ostream& out) {
  out << "i,j,x_m,y_m,max_rsrp_dbm,cell_id\n" << std::setprecision(10);
  const auto& g = map.grid();
  for (std::size_t k = 0; k < g.num_points(); ++k) {
    const auto p = g.point(k);
    const auto pos = grid_to_coords(p, g);
    const auto& best = map.strongest(p);
    out << p.i << ',' << p.j << ',' << pos.x << ',' << pos.y << ',' << best.rsrp_dbm << ','
        << best.cell_id << '\n';
  }
}

}  // namespace uavplan::radio
