#include "reactsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace reactsim {

const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::React: return "REACT";
    case Strategy::OrosOnly: return "OROS_ONLY";
    case Strategy::Naive: return "NAIVE";
  }
  return "UNKNOWN";
}

Strategy parse_strategy(const std::string& name) {
  if (name == "REACT") return Strategy::React;
  if (name == "OROS_ONLY") return Strategy::OrosOnly;
  if (name == "NAIVE") return Strategy::Naive;
  throw ScenarioError("unknown strategy '" + name +
                      "' (expected REACT, OROS_ONLY or NAIVE)");
}

long Scenario::total_ticks() const {
  return static_cast<long>(std::llround(t_max_s / dt_s));
}
long Scenario::realtime_ticks() const {
  return std::max(1L, static_cast<long>(std::llround(realtime_period_s / dt_s)));
}
long Scenario::latency_ticks() const {
  return static_cast<long>(std::llround(link_latency_ms / 1000.0 / dt_s));
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::string unquote(std::string v) {
  if (v.size() >= 2 && ((v.front() == '"' && v.back() == '"') ||
                        (v.front() == '\'' && v.back() == '\''))) {
    return v.substr(1, v.size() - 2);
  }
  return v;
}

using Setter = std::function<void(Scenario&, const std::string&)>;

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ScenarioError("key '" + key + "': expected a number, got '" + v + "'");
  }
}

long parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long i = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return i;
  } catch (const std::exception&) {
    throw ScenarioError("key '" + key + "': expected an integer, got '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ScenarioError("key '" + key + "': expected true/false, got '" + v + "'");
}

const std::map<std::string, Setter>& key_table() {
  static const std::map<std::string, Setter> table = {
      {"map", [](Scenario& s, const std::string& v) { s.map_path = v; }},
      {"strategy",
       [](Scenario& s, const std::string& v) { s.strategy = parse_strategy(v); }},
      {"robots",
       [](Scenario& s, const std::string& v) {
         s.robots = static_cast<int>(parse_int("robots", v));
       }},
      {"T_max_s",
       [](Scenario& s, const std::string& v) { s.t_max_s = parse_double("T_max_s", v); }},
      {"dt_s",
       [](Scenario& s, const std::string& v) { s.dt_s = parse_double("dt_s", v); }},
      {"seed",
       [](Scenario& s, const std::string& v) {
         s.seed = static_cast<std::uint64_t>(parse_int("seed", v));
       }},
      {"always_on",
       [](Scenario& s, const std::string& v) { s.always_on = parse_bool("always_on", v); }},
      {"link_latency_ms",
       [](Scenario& s, const std::string& v) {
         s.link_latency_ms = parse_double("link_latency_ms", v);
       }},
      {"realtime_period_s",
       [](Scenario& s, const std::string& v) {
         s.realtime_period_s = parse_double("realtime_period_s", v);
       }},
      {"sensing.n_rays",
       [](Scenario& s, const std::string& v) {
         s.n_rays = static_cast<int>(parse_int("sensing.n_rays", v));
       }},
      {"sensing.range_m",
       [](Scenario& s, const std::string& v) {
         s.sensing_range_m = parse_double("sensing.range_m", v);
       }},
      {"energy.idle_w",
       [](Scenario& s, const std::string& v) {
         s.power.idle_w = parse_double("energy.idle_w", v);
       }},
      {"energy.locomotion_w_per_mps",
       [](Scenario& s, const std::string& v) {
         s.power.locomotion_w_per_mps = parse_double("energy.locomotion_w_per_mps", v);
       }},
      {"energy.sensing_w",
       [](Scenario& s, const std::string& v) {
         s.power.sensing_w = parse_double("energy.sensing_w", v);
       }},
      {"energy.capacity_j",
       [](Scenario& s, const std::string& v) {
         s.battery_capacity_j = parse_double("energy.capacity_j", v);
       }},
      {"nav.v_max",
       [](Scenario& s, const std::string& v) {
         s.nav.v_max = parse_double("nav.v_max", v);
       }},
      {"nav.v_min",
       [](Scenario& s, const std::string& v) {
         s.nav.v_min = parse_double("nav.v_min", v);
       }},
      {"nav.d_slow",
       [](Scenario& s, const std::string& v) {
         s.nav.d_slow = parse_double("nav.d_slow", v);
       }},
      {"nav.robot_radius_m",
       [](Scenario& s, const std::string& v) {
         s.nav.robot_radius_m = parse_double("nav.robot_radius_m", v);
       }},
      {"nav.stuck_timeout_s",
       [](Scenario& s, const std::string& v) {
         s.nav.stuck_timeout_s = parse_double("nav.stuck_timeout_s", v);
       }},
      {"oros.subarea_size_m",
       [](Scenario& s, const std::string& v) {
         s.subarea_size_m = parse_double("oros.subarea_size_m", v);
       }},
      {"oros.sigma",
       [](Scenario& s, const std::string& v) { s.sigma = parse_double("oros.sigma", v); }},
      {"oros.delta",
       [](Scenario& s, const std::string& v) { s.delta = parse_double("oros.delta", v); }},
      {"oros.horizon",
       [](Scenario& s, const std::string& v) {
         s.oros_horizon = static_cast<int>(parse_int("oros.horizon", v));
       }},
      {"perception.min_region_cells",
       [](Scenario& s, const std::string& v) {
         s.min_region_cells = static_cast<int>(parse_int("perception.min_region_cells", v));
       }},
      {"perception.size_threshold_cells",
       [](Scenario& s, const std::string& v) {
         s.size_threshold_cells =
             static_cast<int>(parse_int("perception.size_threshold_cells", v));
       }},
      {"orchestrator.lambda_m",
       [](Scenario& s, const std::string& v) {
         s.lambda_m = parse_double("orchestrator.lambda_m", v);
       }},
      {"orchestrator.score_scale",
       [](Scenario& s, const std::string& v) {
         s.score_scale = parse_double("orchestrator.score_scale", v);
       }},
  };
  return table;
}

}  // namespace

std::vector<std::string> scenario_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, fn] : key_table()) keys.push_back(k);
  return keys;
}

void apply_override(Scenario& s, const std::string& key, const std::string& value) {
  auto it = key_table().find(key);
  if (it == key_table().end()) {
    throw ScenarioError("unknown config key '" + key + "'");
  }
  it->second(s, value);
}

Scenario parse_scenario(const std::string& text, const std::string& base_dir,
                        const std::string& name) {
  Scenario s;
  s.name = name;

  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ScenarioError(name + ":" + std::to_string(line_no) +
                          ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = unquote(trim(line.substr(eq + 1)));
    try {
      apply_override(s, key, value);
    } catch (const ScenarioError& e) {
      throw ScenarioError(name + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }

  if (s.map_path.empty()) {
    throw ScenarioError(name + ": missing required key 'map'");
  }
  if (!base_dir.empty() && s.map_path.front() != '/') {
    s.map_path = base_dir + "/" + s.map_path;
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError("cannot open scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();

  std::string base_dir;
  std::string name = path;
  const auto slash = path.find_last_of('/');
  if (slash != std::string::npos) {
    base_dir = path.substr(0, slash);
    name = path.substr(slash + 1);
  }
  const auto dot = name.find_last_of('.');
  if (dot != std::string::npos) name.erase(dot);
  return parse_scenario(buf.str(), base_dir, name);
}

void validate_scenario(const Scenario& s, const WorldMap& map) {
  if (s.robots < 1) throw ScenarioError("key 'robots': must be >= 1");
  if (s.robots > static_cast<int>(map.spawn_points.size())) {
    throw ScenarioError("key 'robots': " + std::to_string(s.robots) +
                        " robots but the map has only " +
                        std::to_string(map.spawn_points.size()) + " spawn points");
  }
  if (s.dt_s <= 0) throw ScenarioError("key 'dt_s': must be > 0");
  const double ticks = s.t_max_s / s.dt_s;
  if (std::abs(ticks - std::round(ticks)) > 1e-6) {
    throw ScenarioError("key 'T_max_s': must be a multiple of dt_s");
  }
  if (s.t_max_s <= 0) throw ScenarioError("key 'T_max_s': must be > 0");
  if (s.nav.v_max <= 0 || s.nav.v_min < 0 || s.nav.v_min > s.nav.v_max) {
    throw ScenarioError("key 'nav.v_max'/'nav.v_min': need 0 <= v_min <= v_max, v_max > 0");
  }
  if (s.delta <= 0 || s.delta > 1) {
    throw ScenarioError("key 'oros.delta': must be in (0, 1]");
  }
  if (s.subarea_size_m <= 0) {
    throw ScenarioError("key 'oros.subarea_size_m': must be > 0");
  }
  if (s.n_rays < 1) throw ScenarioError("key 'sensing.n_rays': must be >= 1");
  if (s.sensing_range_m <= 0) {
    throw ScenarioError("key 'sensing.range_m': must be > 0");
  }
  if (s.power.sensing_w <= 0) {
    throw ScenarioError("key 'energy.sensing_w': must be > 0");
  }
  if (s.power.idle_w < 0 || s.power.locomotion_w_per_mps < 0) {
    throw ScenarioError("energy profile values must be >= 0");
  }
  if (s.battery_capacity_j <= 0) {
    throw ScenarioError("key 'energy.capacity_j': must be > 0");
  }
  if (s.link_latency_ms < 0) {
    throw ScenarioError("key 'link_latency_ms': must be >= 0");
  }
  if (s.realtime_period_s < s.dt_s) {
    throw ScenarioError("key 'realtime_period_s': must be >= dt_s");
  }
}

OrchestratorParams orchestrator_params(const Scenario& s) {
  OrchestratorParams p;
  p.delta = s.delta;
  p.min_region_cells = s.min_region_cells;
  p.size_threshold_cells = s.size_threshold_cells;
  p.lambda_m = s.lambda_m;
  p.score_scale = s.score_scale;
  p.realtime_period_s = s.realtime_period_s;
  p.nav = s.nav;
  p.power = s.power;
  p.naive_mode = s.strategy == Strategy::Naive;
  return p;
}

OrosParams oros_params(const Scenario& s) {
  OrosParams p;
  p.sigma = s.sigma;
  p.delta = s.delta;
  p.v_max = s.nav.v_max;
  p.robot_radius_m = s.nav.robot_radius_m;
  p.power = s.power;
  p.horizon_subareas = s.oros_horizon;
  return p;
}

}  // namespace reactsim
