#include "uavplan/scenario.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

namespace uavplan {

using json = nlohmann::ordered_json;

const char* state_mode_name(StateMode mode) {
  return mode == StateMode::kPosition ? "position" : "position_cell";
}

StateMode parse_state_mode(const std::string& text) {
  if (text == "position") return StateMode::kPosition;
  if (text == "position_cell") return StateMode::kPositionAndCell;
  throw ValidationError("unknown state mode '" + text + "'");
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
    throw ValidationError("learning rate must lie in (0, 1]");
  }
  if (!(discount >= 0.0 && discount < 1.0)) {
    throw ValidationError("discount must lie in [0, 1)");
  }
  if (!(epsilon_min >= 0.0 && epsilon_min <= epsilon_start && epsilon_start <= 1.0)) {
    throw ValidationError("need 0 <= epsilon_min <= epsilon_start <= 1");
  }
  if (epsilon_decay < 0.0) throw ValidationError("epsilon decay must be non-negative");
  if (max_episodes < 1) throw ValidationError("need at least one episode");
  if (max_steps_per_episode < 0) throw ValidationError("step cap must be non-negative");
}

void Scenario::validate() const {
  grid.validate();
  channel.validate();
  power.validate();
  budget().validate();
  weights.validate();
  rl.validate();
  if (cells.empty()) throw ValidationError("scenario has no cells");
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const auto& c = cells[k];
    if (c.id != static_cast<int>(k)) throw ValidationError("cell ids must be dense and ordered");
    if (!(c.azimuth_deg >= 0.0 && c.azimuth_deg < 360.0)) {
      throw ValidationError("cell azimuth must lie in [0, 360)");
    }
    if (c.downtilt_deg < 0.0) throw ValidationError("cell downtilt must be non-negative");
  }
  if (!grid.contains(start) || !grid.contains(goal)) {
    throw ValidationError("start and goal must lie on the grid");
  }
  if (start == goal) throw ValidationError("start and goal must differ");
  if (!(speed > 0.0)) throw ValidationError("speed must be positive");
  if (!(energy_budget() > 0.0)) throw ValidationError("energy budget must be positive");
}

void set_corner_endpoints(Scenario& scenario) {
  scenario.start = {0, 0};
  scenario.goal = {scenario.grid.size - 1, scenario.grid.size - 1};
}

Scenario generate_scenario(std::uint64_t seed, const DeploymentParams& params,
                           const Scenario& base, bool keep_endpoints) {
  const int sites = params.three_sector_sites + params.two_sector_sites;
  if (params.three_sector_sites < 0 || params.two_sector_sites < 0 || sites == 0) {
    throw ValidationError("deployment has no cells");
  }
  if (!(params.area_side > 2.0 * params.edge_margin) || !(params.step > 0.0)) {
    throw ValidationError("deployment area too small");
  }
  const double cells_per_side = params.area_side / params.step;
  if (std::abs(cells_per_side - std::round(cells_per_side)) > 1e-9) {
    throw ValidationError("area side must be a multiple of the grid step");
  }

  Scenario s = base;
  s.seed = seed;
  s.grid.origin = {0.0, 0.0};
  s.grid.step = params.step;
  s.grid.size = static_cast<int>(std::lround(cells_per_side)) + 1;
  s.grid.altitude = params.altitude;
  if (!keep_endpoints) set_corner_endpoints(s);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(params.edge_margin,
                                               params.area_side - params.edge_margin);
  std::vector<Vec2> placed;
  int attempts = 0;
  const double min_d2 = params.min_site_distance * params.min_site_distance;
  while (static_cast<int>(placed.size()) < sites) {
    if (++attempts > params.max_attempts) {
      throw InfeasibleError("could not place " + std::to_string(sites) +
                            " sites with the requested separation");
    }
    const Vec2 candidate{coord(rng), coord(rng)};
    bool ok = true;
    for (const auto& q : placed) {
      const double dx = q.x - candidate.x;
      const double dy = q.y - candidate.y;
      if (dx * dx + dy * dy < min_d2) {
        ok = false;
        break;
      }
    }
    if (ok) placed.push_back(candidate);
  }

  s.cells.clear();
  for (int site = 0; site < sites; ++site) {
    const bool three = site < params.three_sector_sites;
    const int sectors = three ? 3 : 2;
    for (int k = 0; k < sectors; ++k) {
      Cell c;
      c.id = static_cast<int>(s.cells.size());
      c.bs_position = {placed[site].x, placed[site].y, params.mast_height};
      c.azimuth_deg = k * 360.0 / sectors;
      c.downtilt_deg = params.downtilt_deg;
      c.tx_power_dbm = params.tx_power_dbm;
      s.cells.push_back(c);
    }
  }
  s.validate();
  return s;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

json to_json(const radio::ChannelParams& p) {
  return {
      {"carrier_freq_hz", p.carrier_freq_hz},
      {"los_terrestrial_max_height", p.los_terrestrial_max_height},
      {"los_full_height", p.los_full_height},
      {"los_terrestrial_d1", p.los_terrestrial_d1},
      {"los_terrestrial_p1", p.los_terrestrial_p1},
      {"los_aerial_d1_slope", p.los_aerial_d1_slope},
      {"los_aerial_d1_offset", p.los_aerial_d1_offset},
      {"los_aerial_d1_min", p.los_aerial_d1_min},
      {"los_aerial_p1_slope", p.los_aerial_p1_slope},
      {"los_aerial_p1_offset", p.los_aerial_p1_offset},
      {"los_excess_db", p.los_excess_db},
      {"nlos_intercept_db", p.nlos_intercept_db},
      {"nlos_exponent_base", p.nlos_exponent_base},
      {"nlos_exponent_height", p.nlos_exponent_height},
      {"nlos_min_height", p.nlos_min_height},
      {"nlos_max_height", p.nlos_max_height},
      {"element_gain_dbi", p.element_gain_dbi},
      {"h_beamwidth_deg", p.h_beamwidth_deg},
      {"v_beamwidth_deg", p.v_beamwidth_deg},
      {"max_attenuation_db", p.max_attenuation_db},
      {"v_sidelobe_db", p.v_sidelobe_db},
      {"vertical_elements", p.vertical_elements},
      {"element_spacing_wl", p.element_spacing_wl},
  };
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad value for '") + key + "': " + e.what());
  }
}

void from_json_channel(const json& j, radio::ChannelParams& p) {
  read(j, "carrier_freq_hz", p.carrier_freq_hz);
  read(j, "los_terrestrial_max_height", p.los_terrestrial_max_height);
  read(j, "los_full_height", p.los_full_height);
  read(j, "los_terrestrial_d1", p.los_terrestrial_d1);
  read(j, "los_terrestrial_p1", p.los_terrestrial_p1);
  read(j, "los_aerial_d1_slope", p.los_aerial_d1_slope);
  read(j, "los_aerial_d1_offset", p.los_aerial_d1_offset);
  read(j, "los_aerial_d1_min", p.los_aerial_d1_min);
  read(j, "los_aerial_p1_slope", p.los_aerial_p1_slope);
  read(j, "los_aerial_p1_offset", p.los_aerial_p1_offset);
  read(j, "los_excess_db", p.los_excess_db);
  read(j, "nlos_intercept_db", p.nlos_intercept_db);
  read(j, "nlos_exponent_base", p.nlos_exponent_base);
  read(j, "nlos_exponent_height", p.nlos_exponent_height);
  read(j, "nlos_min_height", p.nlos_min_height);
  read(j, "nlos_max_height", p.nlos_max_height);
  read(j, "element_gain_dbi", p.element_gain_dbi);
  read(j, "h_beamwidth_deg", p.h_beamwidth_deg);
  read(j, "v_beamwidth_deg", p.v_beamwidth_deg);
  read(j, "max_attenuation_db", p.max_attenuation_db);
  read(j, "v_sidelobe_db", p.v_sidelobe_db);
  read(j, "vertical_elements", p.vertical_elements);
  read(j, "element_spacing_wl", p.element_spacing_wl);
}

json to_json(const energy::PowerParams& p) {
  return {
      {"blade_profile_power", p.blade_profile_power},
      {"induced_power", p.induced_power},
      {"tip_speed", p.tip_speed},
      {"mean_induced_velocity", p.mean_induced_velocity},
      {"fuselage_drag_ratio", p.fuselage_drag_ratio},
      {"air_density", p.air_density},
      {"rotor_solidity", p.rotor_solidity},
      {"rotor_disc_area", p.rotor_disc_area},
  };
}

void from_json_power(const json& j, energy::PowerParams& p) {
  read(j, "blade_profile_power", p.blade_profile_power);
  read(j, "induced_power", p.induced_power);
  read(j, "tip_speed", p.tip_speed);
  read(j, "mean_induced_velocity", p.mean_induced_velocity);
  read(j, "fuselage_drag_ratio", p.fuselage_drag_ratio);
  read(j, "air_density", p.air_density);
  read(j, "rotor_solidity", p.rotor_solidity);
  read(j, "rotor_disc_area", p.rotor_disc_area);
}

json to_json(const TrainConfig& c) {
  return {
      {"learning_rate", c.learning_rate},
      {"discount", c.discount},
      {"epsilon_start", c.epsilon_start},
      {"epsilon_min", c.epsilon_min},
      {"epsilon_decay", c.epsilon_decay},
      {"max_episodes", c.max_episodes},
      {"max_steps_per_episode", c.max_steps_per_episode},
      {"state_mode", state_mode_name(c.state_mode)},
      {"seed", c.seed},
  };
}

void from_json_rl(const json& j, TrainConfig& c) {
  read(j, "learning_rate", c.learning_rate);
  read(j, "discount", c.discount);
  read(j, "epsilon_start", c.epsilon_start);
  read(j, "epsilon_min", c.epsilon_min);
  read(j, "epsilon_decay", c.epsilon_decay);
  read(j, "max_episodes", c.max_episodes);
  read(j, "max_steps_per_episode", c.max_steps_per_episode);
  if (j.contains("state_mode")) {
    std::string mode;
    read(j, "state_mode", mode);
    c.state_mode = parse_state_mode(mode);
  }
  read(j, "seed", c.seed);
}

json point_json(GridPoint p) { return json::array({p.i, p.j}); }

GridPoint read_point(const json& j, const char* key) {
  try {
    const auto& a = j.at(key);
    if (!a.is_array() || a.size() != 2) throw ValidationError("");
    return {a[0].get<int>(), a[1].get<int>()};
  } catch (const std::exception&) {
    throw ValidationError(std::string("'") + key + "' must be an [i, j] pair");
  }
}

json parse(const std::string& text) {
  try {
    return json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("malformed JSON: ") + e.what());
  }
}

// Reads every section except cells and endpoints into `s`.
void read_common(const json& j, Scenario& s) {
  if (j.contains("grid")) {
    const auto& g = j["grid"];
    if (g.contains("origin")) {
      const auto& o = g["origin"];
      if (!o.is_array() || o.size() != 2) throw ValidationError("grid.origin must be [x, y]");
      s.grid.origin = {o[0].get<double>(), o[1].get<double>()};
    }
    read(g, "step", s.grid.step);
    read(g, "size", s.grid.size);
    read(g, "altitude", s.grid.altitude);
  }
  if (j.contains("channel")) from_json_channel(j["channel"], s.channel);
  if (j.contains("power")) from_json_power(j["power"], s.power);
  if (j.contains("energy")) {
    read(j["energy"], "capacity", s.energy_capacity);
    read(j["energy"], "reserve", s.energy_reserve);
  }
  if (j.contains("mission")) {
    const auto& m = j["mission"];
    read(m, "speed", s.speed);
    read(m, "rsrp_threshold_dbm", s.rsrp_threshold_dbm);
  }
  if (j.contains("weights")) {
    const auto& w = j["weights"];
    read(w, "energy", s.weights.energy);
    read(w, "signal", s.weights.signal);
    read(w, "handoff", s.weights.handoff);
  }
  if (j.contains("rl")) from_json_rl(j["rl"], s.rl);
  read(j, "seed", s.seed);
}

bool read_endpoints(const json& j, Scenario& s) {
  if (!j.contains("mission")) return false;
  const auto& m = j["mission"];
  const bool has_start = m.contains("start");
  const bool has_goal = m.contains("goal");
  if (has_start != has_goal) throw ValidationError("mission needs both start and goal");
  if (!has_start) return false;
  s.start = read_point(m, "start");
  s.goal = read_point(m, "goal");
  return true;
}

bool read_cells(const json& j, Scenario& s) {
  if (!j.contains("cells")) return false;
  s.cells.clear();
  for (const auto& c : j["cells"]) {
    Cell cell;
    read(c, "id", cell.id);
    const auto& p = c.at("position");
    if (!p.is_array() || p.size() != 3) throw ValidationError("cell position must be [x, y, z]");
    cell.bs_position = {p[0].get<double>(), p[1].get<double>(), p[2].get<double>()};
    read(c, "azimuth_deg", cell.azimuth_deg);
    read(c, "downtilt_deg", cell.downtilt_deg);
    read(c, "tx_power_dbm", cell.tx_power_dbm);
    s.cells.push_back(cell);
  }
  return true;
}

}  // namespace

std::string scenario_to_json(const Scenario& s) {
  json cells = json::array();
  for (const auto& c : s.cells) {
    cells.push_back({{"id", c.id},
                     {"position", {c.bs_position.x, c.bs_position.y, c.bs_position.z}},
                     {"azimuth_deg", c.azimuth_deg},
                     {"downtilt_deg", c.downtilt_deg},
                     {"tx_power_dbm", c.tx_power_dbm}});
  }
  json j = {
      {"seed", s.seed},
      {"grid",
       {{"origin", {s.grid.origin.x, s.grid.origin.y}},
        {"step", s.grid.step},
        {"size", s.grid.size},
        {"altitude", s.grid.altitude}}},
      {"mission",
       {{"start", point_json(s.start)},
        {"goal", point_json(s.goal)},
        {"speed", s.speed},
        {"rsrp_threshold_dbm", s.rsrp_threshold_dbm}}},
      {"weights",
       {{"energy", s.weights.energy},
        {"signal", s.weights.signal},
        {"handoff", s.weights.handoff}}},
      {"energy", {{"capacity", s.energy_capacity}, {"reserve", s.energy_reserve}}},
      {"power", to_json(s.power)},
      {"channel", to_json(s.channel)},
      {"rl", to_json(s.rl)},
      {"cells", cells},
  };
  return j.dump(2) + "\n";
}

Scenario scenario_from_json(const std::string& text) {
  const json j = parse(text);
  Scenario s;
  try {
    read_common(j, s);
    if (!read_cells(j, s)) throw ValidationError("scenario file has no cells");
    if (!read_endpoints(j, s)) throw ValidationError("scenario file needs start and goal");
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad scenario: ") + e.what());
  }
  s.validate();
  return s;
}

Config config_from_json(const std::string& text) {
  const json j = parse(text);
  Config cfg;
  try {
    read_common(j, cfg.scenario);
    cfg.has_cells = read_cells(j, cfg.scenario);
    cfg.has_endpoints = read_endpoints(j, cfg.scenario);
    if (j.contains("deployment")) {
      const auto& d = j["deployment"];
      auto& p = cfg.deployment;
      read(d, "area_side", p.area_side);
      read(d, "three_sector_sites", p.three_sector_sites);
      read(d, "two_sector_sites", p.two_sector_sites);
      read(d, "min_site_distance", p.min_site_distance);
      read(d, "edge_margin", p.edge_margin);
      read(d, "mast_height", p.mast_height);
      read(d, "downtilt_deg", p.downtilt_deg);
      read(d, "tx_power_dbm", p.tx_power_dbm);
      read(d, "max_attempts", p.max_attempts);
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad configuration: ") + e.what());
  }
  // Grid step and altitude drive the deployment's grid.
  cfg.deployment.step = cfg.scenario.grid.step;
  cfg.deployment.altitude = cfg.scenario.grid.altitude;
  cfg.scenario.weights.validate();
  return cfg;
}

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

Config load_config(const std::filesystem::path& path) {
  return config_from_json(slurp(path));
}

Scenario load_scenario(const std::filesystem::path& path) {
  return scenario_from_json(slurp(path));
}

void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << scenario_to_json(scenario);
  if (!out) throw IoError("write failed for " + path.string());
}

std::uint64_t fnv1a64(const void* data, std::size_t size, std::uint64_t seed) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t k = 0; k < size; ++k) {
    h ^= bytes[k];
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t radio_digest(const Scenario& s) {
  json j = {{"origin", {s.grid.origin.x, s.grid.origin.y}},
            {"step", s.grid.step},
            {"size", s.grid.size},
            {"channel", to_json(s.channel)}};
  json cells = json::array();
  for (const auto& c : s.cells) {
    cells.push_back({c.id, c.bs_position.x, c.bs_position.y, c.bs_position.z,
                     c.azimuth_deg, c.downtilt_deg, c.tx_power_dbm});
  }
  j["cells"] = cells;
  const std::string text = j.dump();
  return fnv1a64(text.data(), text.size());
}

}  // namespace uavplan
