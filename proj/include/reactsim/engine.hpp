#pragma once

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "reactsim/events.hpp"
#include "reactsim/orchestrator.hpp"
#include "reactsim/scenario.hpp"
#include "reactsim/subarea.hpp"
#include "reactsim/world_map.hpp"

namespace reactsim {

class EngineInvariantError : public std::runtime_error {
 public:
  explicit EngineInvariantError(const std::string& msg) : std::runtime_error(msg) {}
};

struct CoverageSample {
  long tick = 0;
  double seconds = 0.0;
  double coverage = 0.0;             // fraction of reachable free cells known
  std::vector<double> charge_j;      // per robot
};

struct TrajectorySample {
  long tick = 0;
  int robot = 0;
  double x = 0.0;
  double y = 0.0;
  bool sensing_on = false;  // physical sensor power this tick
};

struct RobotReport {
  int id = 0;
  double consumed_j = 0.0;
  double sensing_off_s = 0.0;
  double final_charge_j = 0.0;
  RobotStatus final_status = RobotStatus::Idle;
  Vec2 final_pose;
};

struct MissionResult {
  std::vector<CoverageSample> coverage;
  std::vector<TrajectorySample> trajectories;
  EventLog events;
  std::vector<RobotReport> robots;
  std::vector<LocalTarget> unvisited;
  double final_coverage = 0.0;
  long end_tick = 0;
  double end_seconds = 0.0;
  long flags_complete_tick = -1;  // first tick with every subarea flagged
  std::string solver_modes;       // solver modes seen, e.g. "exhaustive"
  OccupancyGrid final_merged;     // merged knowledge at mission end
  SubareaGrid final_subareas;

  // Seconds until the coverage fraction first reaches `frac`; +inf if never.
  double time_to_coverage(double frac) const {
    for (const CoverageSample& s : coverage) {
      if (s.coverage >= frac) return s.seconds;
    }
    return std::numeric_limits<double>::infinity();
  }
};

MissionResult run(const Scenario& scenario, const WorldMap& map);
MissionResult run(const Scenario& scenario);  // loads scenario.map_path

struct MatrixRow {
  std::string scenario;
  Strategy strategy = Strategy::React;
  int robots = 1;
  bool always_on = false;
  std::uint64_t seed = 1;
  double final_coverage = 0.0;
  double time_to_90_s = 0.0;  // -1 when never reached
  double end_seconds = 0.0;
  int robot_id = 0;
  double consumed_j = 0.0;
  double savings_j = 0.0;  // always-on twin consumption minus this run's
};

// Runs every scenario plus, for gated ones, an always-on twin; emits one row
// per (run, robot). A failed run is reported on stderr and skipped.
std::vector<MatrixRow> run_strategy_matrix(const std::vector<Scenario>& scenarios);

// Fixed column order, 6-decimal floats.
void write_coverage_csv(std::ostream& out, const MissionResult& result);
void write_trajectories_csv(std::ostream& out, const MissionResult& result);
void write_events_log(std::ostream& out, const MissionResult& result);
void write_summary_csv(std::ostream& out, const std::vector<MatrixRow>& rows);

// Rows for a single run; pairs it with its always-on twin for the savings
// column when the scenario itself is gated.
std::vector<MatrixRow> summarize_run(const Scenario& scenario,
                                     const MissionResult& gated,
                                     const MissionResult* always_on_twin);

}  // namespace reactsim
