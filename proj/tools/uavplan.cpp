// uavplan: scenario generation, radio maps, training, planning, evaluation.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "uavplan/baselines.hpp"
#include "uavplan/eval.hpp"
#include "uavplan/planner.hpp"
#include "uavplan/radio_map.hpp"
#include "uavplan/scenario.hpp"

namespace fs = std::filesystem;
using namespace uavplan;
using baselines::PlannerKind;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitIo = 4;

struct Options {
  std::string config;
  std::string scenario;
  std::string map;
  std::string qtable;
  std::string out;
  std::string out_dir;
  std::string planner = "proposed";
  std::string eval_planners = "all";
  std::string weights;
  std::optional<std::uint64_t> seed;
  std::optional<double> altitude;
  int mprime = 3;
  std::optional<int> episodes;
  std::optional<std::string> state_mode;
  bool sweep = false;
  bool candidates_csv = false;
  std::size_t oracle_max_nodes = 2'000'000;
};

fs::path out_dir(const Options& o) {
  fs::path dir = o.out_dir;
  if (dir.empty()) {
    const char* env = std::getenv("UAVPLAN_OUT_DIR");
    dir = env && *env ? env : ".";
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  body(out);
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

std::string altitude_tag(double h) {
  std::ostringstream s;
  s << "h" << h;
  return s.str();
}

Scenario scenario_for_run(const Options& o) {
  if (o.scenario.empty()) throw ValidationError("--scenario is required");
  Scenario s = load_scenario(o.scenario);
  if (o.altitude) s.grid.altitude = *o.altitude;
  if (o.seed) s.rl.seed = *o.seed;
  if (o.episodes) s.rl.max_episodes = *o.episodes;
  if (o.state_mode) s.rl.state_mode = parse_state_mode(*o.state_mode);
  if (!o.weights.empty()) s.weights = parse_weights(o.weights);
  s.validate();
  return s;
}

radio::RadioMap map_for_run(const Options& o, const Scenario& s) {
  if (o.map.empty()) return radio::build_radio_map(s, o.mprime);
  auto map = radio::load_radio_map(o.map);
  radio::require_match(s, map);
  return map;
}

std::optional<Weights> weights_override(const Options& o) {
  if (o.weights.empty()) return std::nullopt;
  return parse_weights(o.weights);
}

std::vector<PlannerKind> selected_planners(const std::string& name) {
  if (name == "all") {
    return {PlannerKind::kProposed, PlannerKind::kProposed2, PlannerKind::kShortest,
            PlannerKind::kRsrpAware};
  }
  return {baselines::parse_planner(name)};
}

nlohmann::ordered_json metrics_json(const eval::MissionMetrics& m, const std::string& name,
                                    const baselines::PlanOutcome& run, double altitude) {
  auto j = nlohmann::ordered_json::parse(eval::metrics_to_json(m, name));
  j["altitude_m"] = altitude;
  j["weights"] = {run.weights.energy, run.weights.signal, run.weights.handoff};
  if (run.training) {
    const auto& t = *run.training;
    j["training"] = {{"episodes", t.log.size()},
                     {"feasible_episodes", t.feasible_episodes},
                     {"best_episode", t.best_episode},
                     {"best_reward", t.best_reward},
                     {"epsilon_decay", t.epsilon_decay},
                     {"max_steps", t.max_steps}};
  }
  return j;
}

void print_summary(const std::string& name, const eval::MissionMetrics& m) {
  std::cout << std::left << std::setw(11) << name << std::right << " waypoints "
            << std::setw(5) << m.waypoints << "  handoffs " << std::setw(4) << m.handoffs
            << "  disconn " << std::fixed << std::setprecision(2) << std::setw(6)
            << m.disconnectivity_pct << "%  battery " << std::setw(5) << m.battery_pct
            << "%  objective " << std::setprecision(4) << m.normalized_objective << '\n'
            << std::defaultfloat;
}

// ---------------------------------------------------------------------------

int cmd_gen(const Options& o) {
  Config cfg = o.config.empty() ? Config{} : load_config(o.config);
  Scenario s;
  if (cfg.has_cells) {
    s = cfg.scenario;
    if (o.seed) s.seed = *o.seed;
  } else {
    const std::uint64_t seed = o.seed.value_or(cfg.scenario.seed);
    s = generate_scenario(seed, cfg.deployment, cfg.scenario, cfg.has_endpoints);
  }
  if (o.altitude) s.grid.altitude = *o.altitude;
  s.validate();
  const fs::path path = o.out.empty() ? out_dir(o) / "scenario.json" : fs::path(o.out);
  save_scenario(s, path);
  std::cout << "scenario: " << s.cells.size() << " cells, grid " << s.grid.size << "x"
            << s.grid.size << " @ " << s.grid.step << " m, h=" << s.grid.altitude
            << " m, start (" << s.start.i << "," << s.start.j << ") goal (" << s.goal.i << ","
            << s.goal.j << "), seed " << s.seed << " -> " << path.string() << '\n';
  return 0;
}

int cmd_map(const Options& o) {
  if (o.scenario.empty()) throw ValidationError("--scenario is required");
  const Scenario base = load_scenario(o.scenario);
  std::vector<double> altitudes;
  if (o.sweep) {
    altitudes = {20.0, 40.0, 80.0, 120.0};
  } else {
    altitudes = {o.altitude.value_or(base.grid.altitude)};
  }
  const fs::path dir = out_dir(o);

  std::vector<std::optional<radio::RadioMap>> maps(altitudes.size());
  std::vector<std::string> errors(altitudes.size());
  const auto n = static_cast<std::ptrdiff_t>(altitudes.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    try {
      Scenario s = base;
      s.grid.altitude = altitudes[k];
      maps[k] = radio::build_radio_map(s, o.mprime);
    } catch (const std::exception& e) {
      errors[k] = e.what();
    }
  }
  for (const auto& e : errors) {
    if (!e.empty()) throw ValidationError(e);
  }

  for (std::size_t k = 0; k < altitudes.size(); ++k) {
    const auto& map = *maps[k];
    const std::string tag = altitude_tag(altitudes[k]);
    const fs::path bin = dir / ("map_" + tag + ".bin");
    radio::save_radio_map(map, bin);
    write_file(dir / ("heatmap_" + tag + ".csv"),
               [&](std::ostream& out) { radio::write_heatmap_csv(map, out); });
    if (o.candidates_csv) {
      write_file(dir / ("candidates_" + tag + ".csv"),
                 [&](std::ostream& out) { radio::write_candidates_csv(map, out); });
    }
    std::cout << "map " << tag << ": M'=" << map.candidates() << ", coverage "
              << std::fixed << std::setprecision(1)
              << 100.0 * map.coverage_fraction(base.rsrp_threshold_dbm) << "% at "
              << base.rsrp_threshold_dbm << " dBm -> " << bin.string() << '\n'
              << std::defaultfloat;
  }
  return 0;
}

// train and plan share everything but the Q-table handling.
int run_single(const Options& o, bool save_table) {
  const Scenario s = scenario_for_run(o);
  const auto map = map_for_run(o, s);
  const fs::path dir = out_dir(o);

  baselines::PlanOutcome run;
  std::string name;
  if (!o.qtable.empty()) {
    if (save_table) throw ValidationError("--qtable is only accepted by plan");
    const auto file = planner::load_qtable(o.qtable);
    const auto table_map = file.q.ranks() == map.candidates() ? map : map.truncated(file.q.ranks());
    run.weights = s.weights;
    run.trajectory = planner::rollout(file.q, s, table_map);
    name = "greedy";
  } else {
    const auto kind = baselines::parse_planner(o.planner);
    if (save_table && kind == PlannerKind::kShortest) {
      throw ValidationError("train needs a learning planner; use plan for the shortest path");
    }
    name = baselines::planner_name(kind);
    run = baselines::run_planner(kind, s, map, weights_override(o));
  }

  const auto m = eval::evaluate(run.trajectory, s, run.weights);
  write_file(dir / ("trajectory_" + name + ".csv"), [&](std::ostream& out) {
    planner::write_trajectory_csv(run.trajectory, s.grid, out);
  });
  write_file(dir / ("metrics_" + name + ".json"), [&](std::ostream& out) {
    out << metrics_json(m, name, run, s.grid.altitude).dump(2) << '\n';
  });
  if (run.training) {
    write_file(dir / ("training_" + name + ".csv"), [&](std::ostream& out) {
      planner::write_training_log(run.training->log, out);
    });
    if (save_table) {
      planner::save_qtable(run.training->q, s.rl.seed, static_cast<int>(run.training->log.size()),
                           dir / ("qtable_" + name + ".bin"));
    }
  }
  print_summary(name, m);
  return 0;
}

int cmd_eval(const Options& o) {
  const Scenario s = scenario_for_run(o);
  const auto map = map_for_run(o, s);
  const fs::path dir = out_dir(o);
  const auto kinds = selected_planners(o.eval_planners);
  const auto override_weights = weights_override(o);

  struct Row {
    std::optional<baselines::PlanOutcome> run;
    std::string error;
    bool infeasible = false;
  };
  std::vector<Row> rows(kinds.size());
  const auto n = static_cast<std::ptrdiff_t>(kinds.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    try {
      rows[k].run = baselines::run_planner(kinds[k], s, map, override_weights);
    } catch (const InfeasibleError& e) {
      rows[k].error = e.what();
      rows[k].infeasible = true;
    } catch (const std::exception& e) {
      rows[k].error = e.what();
    }
  }

  const std::size_t nodes = s.grid.num_points() * static_cast<std::size_t>(map.candidates());
  const bool oracle_ok = nodes <= o.oracle_max_nodes;
  std::map<std::tuple<double, double, double>, double> oracle_cache;
  const auto oracle_cost = [&](const Weights& w) {
    const auto key = std::make_tuple(w.energy, w.signal, w.handoff);
    if (auto it = oracle_cache.find(key); it != oracle_cache.end()) return it->second;
    const double c = eval::oracle_optimal(s, map, w, o.oracle_max_nodes).cost;
    oracle_cache.emplace(key, c);
    return c;
  };

  bool any_infeasible = false;
  std::ostringstream table;
  table << "planner,status,altitude_m,waypoints,handoffs,disconnectivity_pct,battery_pct,"
           "energy_J,total_distance_m,objective,normalized_objective,oracle_objective,"
           "optimality_gap,reached_goal\n"
        << std::setprecision(10);
  for (std::size_t k = 0; k < kinds.size(); ++k) {
    const std::string name = baselines::planner_name(kinds[k]);
    const auto& row = rows[k];
    if (!row.run) {
      if (!row.infeasible) throw ValidationError(name + ": " + row.error);
      any_infeasible = true;
      std::cerr << name << ": infeasible: " << row.error << '\n';
      table << name << ",infeasible," << s.grid.altitude << ",,,,,,,,,,,false\n";
      continue;
    }
    const auto& run = *row.run;
    const auto m = eval::evaluate(run.trajectory, s, run.weights);
    const auto cdf = eval::rsrp_cdf(run.trajectory);

    write_file(dir / ("trajectory_" + name + ".csv"), [&](std::ostream& out) {
      planner::write_trajectory_csv(run.trajectory, s.grid, out);
    });
    write_file(dir / ("cdf_" + name + ".csv"),
               [&](std::ostream& out) { eval::write_cdf_csv(cdf, out); });
    auto j = metrics_json(m, name, run, s.grid.altitude);
    std::string oracle_obj;
    std::string gap;
    if (oracle_ok) {
      const double c = oracle_cost(run.weights);
      j["oracle_normalized_objective"] = c;
      j["optimality_gap"] = m.normalized_objective - c;
      std::ostringstream a;
      std::ostringstream b;
      a << std::setprecision(10) << c;
      b << std::setprecision(10) << m.normalized_objective - c;
      oracle_obj = a.str();
      gap = b.str();
    }
    write_file(dir / ("metrics_" + name + ".json"),
               [&](std::ostream& out) { out << j.dump(2) << '\n'; });
    if (run.training) {
      write_file(dir / ("training_" + name + ".csv"), [&](std::ostream& out) {
        planner::write_training_log(run.training->log, out);
      });
    }
    table << name << ",ok," << s.grid.altitude << ',' << m.waypoints << ',' << m.handoffs << ','
          << m.disconnectivity_pct << ',' << m.battery_pct << ',' << m.energy_j << ','
          << m.total_distance << ',' << m.objective << ',' << m.normalized_objective << ','
          << oracle_obj << ',' << gap << ',' << (m.reached_goal ? "true" : "false") << '\n';
    print_summary(name, m);
    if (oracle_ok) std::cout << "            optimality gap " << gap << '\n';
  }
  write_file(dir / "comparison.csv", [&](std::ostream& out) { out << table.str(); });
  if (!oracle_ok) {
    std::cout << "oracle skipped: " << nodes << " product-graph nodes exceed "
              << o.oracle_max_nodes << '\n';
  }
  return any_infeasible ? kExitInfeasible : 0;
}

void add_run_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--scenario", o.scenario, "Scenario JSON file")->required();
  cmd->add_option("--map", o.map, "Radio map file (built on the fly when omitted)");
  cmd->add_option("--altitude", o.altitude, "Flying altitude override (m)");
  cmd->add_option("--mprime", o.mprime, "Candidate cells per grid point when building a map")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--weights", o.weights, "Weights override: en,sig,ho");
  cmd->add_option("--episodes", o.episodes, "Training episodes")->check(CLI::PositiveNumber);
  cmd->add_option("--state-mode", o.state_mode, "Q-table state: position | position_cell");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cargo-UAV trajectory planning and cell association"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--seed", o.seed, "Seed for deployment and training draws");
  app.add_option("--out-dir", o.out_dir, "Output directory (default $UAVPLAN_OUT_DIR or .)");

  auto* gen = app.add_subcommand("gen", "Generate a scenario file");
  gen->add_option("--config", o.config, "JSON configuration");
  gen->add_option("--altitude", o.altitude, "Flying altitude override (m)");
  gen->add_option("--out", o.out, "Scenario output path");

  auto* map = app.add_subcommand("map", "Build radio maps and heatmap CSVs");
  map->add_option("--scenario", o.scenario, "Scenario JSON file")->required();
  map->add_option("--altitude", o.altitude, "Flying altitude (m)");
  map->add_option("--mprime", o.mprime, "Candidate cells per grid point");
  map->add_flag("--sweep", o.sweep, "Build maps at 20, 40, 80 and 120 m");
  map->add_flag("--candidates", o.candidates_csv, "Also write the ranked candidate CSV");

  auto* train = app.add_subcommand("train", "Train a learning planner");
  add_run_options(train, o);
  train->add_option("--planner", o.planner, "proposed | proposed-2 | rsrp-aware");

  auto* plan = app.add_subcommand("plan", "Plan a trajectory");
  add_run_options(plan, o);
  plan->add_option("--planner", o.planner, "proposed | proposed-2 | shortest | rsrp-aware");
  plan->add_option("--qtable", o.qtable, "Greedy rollout from a saved Q-table instead");

  auto* ev = app.add_subcommand("eval", "Compare planners");
  add_run_options(ev, o);
  ev->add_option("--planner", o.eval_planners, "Planner or 'all' (default)");
  ev->add_option("--oracle-max-nodes", o.oracle_max_nodes, "Largest product graph for the oracle");

  for (auto* sub : {gen, map, train, plan, ev}) {
    sub->add_option("--seed", o.seed, "Seed for deployment and training draws");
    sub->add_option("--out-dir", o.out_dir, "Output directory");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitValidation;
  }

  try {
    if (*gen) return cmd_gen(o);
    if (*map) return cmd_map(o);
    if (*train) return run_single(o, true);
    if (*plan) return run_single(o, false);
    if (*ev) return cmd_eval(o);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
