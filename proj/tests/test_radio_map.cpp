#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>
#include <vector>

#include "support.hpp"
#include "uavplan/channel.hpp"
#include "uavplan/radio_map.hpp"

using namespace uavplan;
using namespace uavplan::radio;

namespace {

const Scenario& scenario80() {
  static const Scenario s = fixtures::default_scenario(80.0);
  return s;
}

const RadioMap& map80() {
  static const RadioMap m = build_radio_map(scenario80(), 3);
  return m;
}

}  // namespace

TEST(RadioMap, CandidatesAreTheStrongestCellsInOrder) {
  const auto& s = scenario80();
  const auto& m = map80();
  for (std::size_t k = 0; k < s.grid.num_points(); k += 97) {
    const GridPoint p = s.grid.point(k);
    std::vector<double> all;
    for (const auto& c : s.cells) all.push_back(rsrp(c, grid_to_coords(p, s.grid), s.channel));
    std::sort(all.rbegin(), all.rend());
    const auto row = m.at(p);
    for (int r = 0; r < 3; ++r) {
      EXPECT_EQ(row[r].rsrp_dbm, all[r]);
      EXPECT_EQ(row[r].rsrp_dbm,
                rsrp(s.cells[row[r].cell_id], grid_to_coords(p, s.grid), s.channel));
    }
    EXPECT_GE(row[0].rsrp_dbm, row[1].rsrp_dbm);
    EXPECT_GE(row[1].rsrp_dbm, row[2].rsrp_dbm);
    EXPECT_NE(row[0].cell_id, row[1].cell_id);
  }
}

TEST(RadioMap, ParallelBuildMatchesSerialReference) {
  const auto serial = build_radio_map_serial(scenario80(), 3);
  EXPECT_TRUE(serial == map80());
  EXPECT_EQ(serial.payload_checksum(), map80().payload_checksum());
}

TEST(RadioMap, UniformTxShiftKeepsRanking) {
  Scenario shifted = scenario80();
  for (auto& c : shifted.cells) c.tx_power_dbm += 6.0;
  const auto m = build_radio_map(shifted, 3);
  const auto& base = map80();
  for (std::size_t k = 0; k < m.data().size(); ++k) {
    EXPECT_EQ(m.data()[k].cell_id, base.data()[k].cell_id);
    EXPECT_NEAR(m.data()[k].rsrp_dbm - base.data()[k].rsrp_dbm, 6.0, 1e-9);
  }
}

TEST(RadioMap, HighAltitudeCoverageNoBetterThanForty) {
  const double t = scenario80().rsrp_threshold_dbm;
  Scenario s40 = scenario80();
  s40.grid.altitude = 40.0;
  Scenario s120 = scenario80();
  s120.grid.altitude = 120.0;
  const double c40 = build_radio_map(s40, 1).coverage_fraction(t);
  const double c120 = build_radio_map(s120, 1).coverage_fraction(t);
  EXPECT_LE(c120, c40);
  // The threshold must bind somewhere, otherwise every comparison is moot.
  EXPECT_LT(map80().coverage_fraction(t), 1.0);
  EXPECT_GT(map80().coverage_fraction(t), 0.0);
}

TEST(RadioMap, TruncationKeepsLeadingRanks) {
  const auto one = map80().truncated(1);
  EXPECT_EQ(one.candidates(), 1);
  for (std::size_t k = 0; k < one.grid().num_points(); k += 131) {
    const auto p = one.grid().point(k);
    EXPECT_EQ(one.strongest(p).cell_id, map80().strongest(p).cell_id);
  }
  EXPECT_THROW(map80().truncated(4), ValidationError);
  EXPECT_THROW(map80().truncated(0), ValidationError);
}

TEST(RadioMap, RejectsBadCandidateCount) {
  EXPECT_THROW(build_radio_map(scenario80(), 0), ValidationError);
  EXPECT_THROW(build_radio_map(scenario80(), 65), ValidationError);
  EXPECT_NO_THROW(build_radio_map(fixtures::tiny_scenario(4, 2), 2));
}

TEST(RadioMap, BinaryRoundTripAndCorruption) {
  std::stringstream buf;
  write_radio_map(map80(), buf);
  const std::string bytes = buf.str();
  std::stringstream in(bytes);
  EXPECT_TRUE(read_radio_map(in) == map80());

  std::string flipped = bytes;
  flipped[flipped.size() - 3] ^= 0x40;
  std::stringstream bad(flipped);
  EXPECT_THROW(read_radio_map(bad), IoError);

  std::stringstream cut(bytes.substr(0, bytes.size() / 2));
  EXPECT_THROW(read_radio_map(cut), IoError);

  std::stringstream junk("definitely not a map");
  EXPECT_THROW(read_radio_map(junk), IoError);
}

TEST(RadioMap, ScenarioMatchCheck) {
  EXPECT_NO_THROW(require_match(scenario80(), map80()));
  Scenario other = scenario80();
  other.cells[0].azimuth_deg = 10.0;
  EXPECT_THROW(require_match(other, map80()), ValidationError);
  Scenario higher = scenario80();
  higher.grid.altitude = 120.0;
  EXPECT_THROW(require_match(higher, map80()), ValidationError);
}

TEST(RadioMap, CsvExports) {
  const Scenario s = fixtures::tiny_scenario(3, 2);
  const auto m = build_radio_map(s, 2);
  std::ostringstream heat;
  write_heatmap_csv(m, heat);
  std::ostringstream cand;
  write_candidates_csv(m, cand);
  const auto lines = [](const std::string& t) { return std::count(t.begin(), t.end(), '\n'); };
  EXPECT_EQ(heat.str().substr(0, heat.str().find('\n')), "i,j,x_m,y_m,max_rsrp_dbm,cell_id");
  EXPECT_EQ(lines(heat.str()), 1 + 9);
  EXPECT_EQ(cand.str().substr(0, cand.str().find('\n')), "i,j,rank,cell_id,rsrp_dbm");
  EXPECT_EQ(lines(cand.str()), 1 + 18);
}
