#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "reactsim/engine.hpp"
#include "reactsim/log.hpp"
#include "reactsim/selfcheck.hpp"

namespace fs = std::filesystem;
using namespace reactsim;

namespace {

constexpr int kExitUsage = 2;      // bad flags / arguments
constexpr int kExitScenario = 3;   // unreadable or invalid scenario / map
constexpr int kExitInvariant = 4;  // internal invariant violation

int fail(int code, const std::string& msg) {
  std::cerr << "error: code=" << code << " msg=\"" << msg << "\"\n";
  return code;
}

// "N" or "A..B" inclusive
std::vector<std::uint64_t> parse_seed_spec(const std::string& spec) {
  const auto dots = spec.find("..");
  if (dots == std::string::npos) {
    return {std::stoull(spec)};
  }
  const std::uint64_t a = std::stoull(spec.substr(0, dots));
  const std::uint64_t b = std::stoull(spec.substr(dots + 2));
  if (b < a) throw std::invalid_argument("seed range end before start");
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = a; s <= b; ++s) seeds.push_back(s);
  return seeds;
}

void apply_cli_overrides(Scenario& sc, const std::vector<std::string>& sets,
                         const std::string& strategy, bool always_on_flag) {
  for (const std::string& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw ScenarioError("--set expects key=value, got '" + kv + "'");
    }
    apply_override(sc, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (!strategy.empty()) sc.strategy = parse_strategy(strategy);
  if (always_on_flag) sc.always_on = true;
}

void write_run_outputs(const fs::path& dir, const Scenario& sc,
                       const MissionResult& result,
                       const MissionResult* always_on_twin) {
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "coverage.csv");
    write_coverage_csv(out, result);
  }
  {
    std::ofstream out(dir / "trajectories.csv");
    write_trajectories_csv(out, result);
  }
  {
    std::ofstream out(dir / "events.log");
    write_events_log(out, result);
  }
  {
    std::ofstream out(dir / "summary.csv");
    write_summary_csv(out, summarize_run(sc, result, always_on_twin));
  }
}

int cmd_run(const std::string& scenario_path, const std::string& seed_spec,
            const std::string& out_dir, const std::vector<std::string>& sets,
            const std::string& strategy, bool always_on_flag) {
  Scenario base = load_scenario(scenario_path);
  apply_cli_overrides(base, sets, strategy, always_on_flag);
  const std::vector<std::uint64_t> seeds =
      seed_spec.empty() ? std::vector<std::uint64_t>{base.seed}
                        : parse_seed_spec(seed_spec);

  const WorldMap map = load_map_file(base.map_path);
  for (std::uint64_t seed : seeds) {
    Scenario sc = base;
    sc.seed = seed;
    validate_scenario(sc, map);
    const MissionResult result = run(sc, map);

    MissionResult twin_result;
    const MissionResult* twin = nullptr;
    if (!sc.always_on) {
      Scenario t = sc;
      t.always_on = true;
      twin_result = run(t, map);
      twin = &twin_result;
    }
    const fs::path dir = seeds.size() == 1
                             ? fs::path(out_dir)
                             : fs::path(out_dir) / ("seed_" + std::to_string(seed));
    write_run_outputs(dir, sc, result, twin);
    log_info("run %s seed %llu: coverage %.4f, end %.1f s, outputs in %s",
             sc.name.c_str(), static_cast<unsigned long long>(seed),
             result.final_coverage, result.end_seconds, dir.c_str());
  }
  return 0;
}

int cmd_matrix(const std::string& scenario_dir, const std::string& seed_spec,
               const std::string& out_dir, const std::vector<std::string>& sets) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(scenario_dir)) {
    if (entry.path().extension() == ".toml") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    throw ScenarioError("no .toml scenarios in " + scenario_dir);
  }

  std::vector<Scenario> scenarios;
  for (const fs::path& f : files) {
    Scenario sc = load_scenario(f.string());
    apply_cli_overrides(sc, sets, "", false);
    if (seed_spec.empty()) {
      scenarios.push_back(sc);
    } else {
      for (std::uint64_t seed : parse_seed_spec(seed_spec)) {
        Scenario per_seed = sc;
        per_seed.seed = seed;
        scenarios.push_back(per_seed);
      }
    }
  }

  const std::vector<MatrixRow> rows = run_strategy_matrix(scenarios);
  fs::create_directories(out_dir);
  std::ofstream out(fs::path(out_dir) / "summary.csv");
  write_summary_csv(out, rows);
  log_info("matrix: %zu runs, summary in %s/summary.csv", rows.size(),
           out_dir.c_str());
  return 0;
}

int cmd_validate_map(const std::string& path) {
  const WorldMap map = load_map_file(path);
  const Observability obs = compute_observability(map);
  const auto pockets = find_blind_pockets(map);
  std::cout << "map: " << path << "\n"
            << "size: " << map.width_m << " x " << map.height_m << " m at "
            << map.cell_size_m << " m cells (" << map.cells_x << " x "
            << map.cells_y << " cells)\n"
            << "free cells: " << map.free_cell_count()
            << " (reachable: " << obs.reachable_free_count << ")\n"
            << "spawn points: " << map.spawn_points.size() << "\n"
            << "blind-spot pockets: " << pockets.size() << "\n";
  return 0;
}

int cmd_selftest(std::uint64_t seed) {
  const auto results = check::run_selftest(seed);
  bool all_pass = true;
  for (const auto& r : results) {
    std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.detail
              << "\n";
    all_pass = all_pass && r.pass;
  }
  return all_pass ? 0 : kExitInvariant;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic multi-robot indoor exploration simulator"};
  app.require_subcommand(1);

  std::string scenario_path, scenario_dir, seed_spec, out_dir = "out";
  std::string strategy, map_path;
  std::vector<std::string> sets;
  bool always_on_flag = false;
  std::uint64_t selftest_seed = 1;

  auto* run_cmd = app.add_subcommand("run", "run one scenario");
  run_cmd->add_option("--scenario", scenario_path, "scenario file")->required();
  run_cmd->add_option("--seed,--seeds", seed_spec, "seed N or range A..B");
  run_cmd->add_option("--out", out_dir, "output directory");
  run_cmd->add_option("--set", sets, "override config key=value");
  run_cmd->add_option("--strategy", strategy, "override strategy");
  run_cmd->add_flag("--always-on", always_on_flag, "ignore sensing-off directives");

  auto* matrix_cmd = app.add_subcommand("matrix", "run a scenario directory");
  matrix_cmd->add_option("--scenario-dir", scenario_dir, "directory of .toml files")
      ->required();
  matrix_cmd->add_option("--seed,--seeds", seed_spec, "seed N or range A..B");
  matrix_cmd->add_option("--out", out_dir, "output directory");
  matrix_cmd->add_option("--set", sets, "override config key=value");

  auto* validate_cmd = app.add_subcommand("validate-map", "check a map file");
  validate_cmd->add_option("map", map_path, "map file")->required();

  auto* selftest_cmd = app.add_subcommand("selftest", "run the oracle suites");
  selftest_cmd->add_option("--seed", selftest_seed, "oracle RNG seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "error: code=" << kExitUsage << " msg=\"" << e.what() << "\"\n";
    return kExitUsage;
  }

  try {
    if (run_cmd->parsed()) {
      return cmd_run(scenario_path, seed_spec, out_dir, sets, strategy,
                     always_on_flag);
    }
    if (matrix_cmd->parsed()) {
      return cmd_matrix(scenario_dir, seed_spec, out_dir, sets);
    }
    if (validate_cmd->parsed()) {
      return cmd_validate_map(map_path);
    }
    if (selftest_cmd->parsed()) {
      return cmd_selftest(selftest_seed);
    }
  } catch (const EngineInvariantError& e) {
    return fail(kExitInvariant, e.what());
  } catch (const ScenarioError& e) {
    return fail(kExitScenario, e.what());
  } catch (const MapParseError& e) {
    return fail(kExitScenario, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(kExitUsage, e.what());
  } catch (const std::exception& e) {
    return fail(kExitScenario, e.what());
  }
  return 0;
}
