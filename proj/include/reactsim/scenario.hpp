#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "reactsim/energy.hpp"
#include "reactsim/nav.hpp"
#include "reactsim/orchestrator.hpp"
#include "reactsim/oros.hpp"
#include "reactsim/world_map.hpp"

namespace reactsim {

enum class Strategy { React, OrosOnly, Naive };

const char* strategy_name(Strategy s);
Strategy parse_strategy(const std::string& name);  // throws on unknown name

class ScenarioError : public std::runtime_error {
 public:
  explicit ScenarioError(const std::string& msg) : std::runtime_error(msg) {}
};

// Flat dotted-key scenario: `key = value` lines, '#' comments. Unknown keys
// are rejected so experiment fixtures cannot silently drift.
struct Scenario {
  std::string name = "scenario";
  std::string map_path;

  Strategy strategy = Strategy::React;
  int robots = 1;
  double t_max_s = 240.0;
  double dt_s = 0.1;
  std::uint64_t seed = 1;
  bool always_on = false;
  double link_latency_ms = 0.0;
  double realtime_period_s = 1.0;

  int n_rays = 360;
  double sensing_range_m = 8.0;

  PowerProfile power;
  double battery_capacity_j = 8245.96;

  NavParams nav;

  double subarea_size_m = 10.0;
  double sigma = -1.0;  // auto
  double delta = 0.95;
  int oros_horizon = 32;

  int min_region_cells = 4;
  int size_threshold_cells = 40;
  double lambda_m = -1.0;  // auto
  double score_scale = 1.0;

  long total_ticks() const;
  long realtime_ticks() const;
  long latency_ticks() const;
};

// Known config keys, in documentation order.
std::vector<std::string> scenario_keys();

Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const std::string& text, const std::string& base_dir,
                        const std::string& name);

// --set key=value override; same key table as the scenario file.
void apply_override(Scenario& s, const std::string& key, const std::string& value);

// Semantic checks that need the map (e.g. robots <= spawn points).
void validate_scenario(const Scenario& s, const WorldMap& map);

OrchestratorParams orchestrator_params(const Scenario& s);
OrosParams oros_params(const Scenario& s);

}  // namespace reactsim
