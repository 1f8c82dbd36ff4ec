#pragma once

#include <map>
#include <optional>
#include <vector>

#include "reactsim/events.hpp"
#include "reactsim/nav.hpp"
#include "reactsim/occupancy.hpp"
#include "reactsim/oros.hpp"
#include "reactsim/subarea.hpp"

namespace reactsim {

struct OrchestratorParams {
  double delta = 0.95;
  int min_region_cells = 4;
  int size_threshold_cells = 40;
  double lambda_m = -1.0;  // battery weight in allocation; < 0: 0.25 * map diagonal
  double score_scale = 1.0;
  double realtime_period_s = 1.0;
  NavParams nav;
  PowerProfile power;
  bool naive_mode = false;  // no priority classes, no deferral
};

struct LocalTarget {
  int id = 0;
  UnknownRegion region;
  int subarea = -1;
  long discovered_tick = 0;
};

struct TargetAssignment {
  int robot_id = -1;
  int target_id = -1;
  Path path;
  double est_time_s = 0.0;
  double est_energy_j = 0.0;
};

struct AllocationResult {
  std::vector<TargetAssignment> assignments;
  std::vector<int> rejected_no_path;  // local-target ids no robot can reach
};

struct DpiEstimate {
  struct PerRobot {
    int robot_id = -1;
    double t_dpi_s = 0.0;
    double b_pred_j = 0.0;
    std::vector<int> tour;  // target ids, nearest-next order
  };
  std::vector<PerRobot> robots;
  std::vector<int> unreachable_targets;
};

enum class TargetOutcome { Visited, CoveredIncidentally, Unvisited };

// Middle layer: merged-map bookkeeping, local-target generation and robot
// allocation, greedy-first/deferred-later blind-spot policy, and the deferred
// priority inspection once every subarea is flagged explored.
class Orchestrator {
 public:
  Orchestrator(OrchestratorParams params, double map_diagonal_m);

  // --- local targets --------------------------------------------------

  // Drops or updates targets against the latest merged grid. Fully known
  // regions complete (the pursuing robot, if any, is released to Idle).
  void refresh_targets(const OccupancyGrid& merged, std::vector<RobotState>& robots,
                       long tick, EventLog& events);

  // Region harvesting and allocation for robots sweeping their subareas.
  // working_subarea[i] is robot i's current high-level target (-1 if none);
  // only robots inside an unfinished working subarea harvest regions from it.
  // Returns the new assignments, already applied to robot paths.
  std::vector<TargetAssignment> realtime_step(const OccupancyGrid& merged,
                                              std::vector<RobotState>& robots,
                                              const std::vector<int>& working_subarea,
                                              const SubareaGrid& sg, long tick,
                                              EventLog& events);

  // Greedy global matching minimizing path_length - lambda * charge ratio.
  static AllocationResult allocate(const std::vector<LocalTarget>& targets,
                                   const std::vector<const RobotState*>& robots,
                                   const OccupancyGrid& grid,
                                   const OrchestratorParams& params,
                                   double lambda_m);

  // Eq-style trigger: every subarea flagged explored (including by exception).
  static bool continuation_condition(const SubareaGrid& sg);

  DpiEstimate estimate_dpi(const std::vector<RobotState>& robots,
                           const OccupancyGrid& merged) const;

  // Starts the deferred inspection if some robot passes the battery/time
  // feasibility gate; emits DPI_START or DPI_SKIP. Returns initial assignments.
  std::vector<TargetAssignment> begin_dpi(std::vector<RobotState>& robots,
                                          const OccupancyGrid& merged, long tick,
                                          double now_s, double t_max_s,
                                          EventLog& events);

  // Next tour stop for a robot that finished its DPI target.
  std::optional<TargetAssignment> next_dpi_target(RobotState& robot,
                                                  const OccupancyGrid& merged,
                                                  long tick, EventLog& events);

  // Returns the stuck robot's target to the queue for reallocation.
  void on_robot_stuck(RobotState& robot, long tick, EventLog& events);

  // A robot arrived at the end of its target path.
  void on_robot_arrived(RobotState& robot, const OccupancyGrid& merged, long tick,
                        EventLog& events);

  // Marks whatever is still pending as unvisited; call once at mission end.
  void finalize(long tick);

  // --- state access ----------------------------------------------------

  bool has_active_target(int robot_id) const;
  int active_target_subarea(int robot_id) const;  // -1 when none
  int active_target_count() const { return static_cast<int>(active_.size()); }
  const std::vector<LocalTarget>& deferred_queue() const { return queue_; }
  bool dpi_started() const { return dpi_started_; }
  bool dpi_skipped() const { return dpi_skipped_; }
  bool dpi_complete() const;
  const std::map<int, TargetOutcome>& target_outcomes() const { return outcomes_; }
  const std::vector<LocalTarget>& unvisited() const { return unvisited_; }
  int targets_discovered() const { return next_target_id_; }
  const OrchestratorParams& params() const { return params_; }
  double lambda_m() const { return lambda_m_; }

 private:
  std::vector<TargetAssignment> apply_assignments(AllocationResult&& alloc,
                                                  std::vector<RobotState>& robots,
                                                  long tick, EventLog& events,
                                                  const char* origin);
  void complete_target(int robot_id, const char* reason, long tick, EventLog& events,
                       std::vector<RobotState>& robots);
  void harvest_dpi_leftovers(int subarea, const OccupancyGrid& merged, long tick,
                             EventLog& events);

  OrchestratorParams params_;
  double lambda_m_;
  int next_target_id_ = 0;

  std::vector<LocalTarget> queue_;              // deferred, discovery order
  std::map<int, LocalTarget> active_;           // robot id -> pursued target
  std::map<int, std::vector<int>> dpi_tours_;   // robot id -> pending target ids
  std::vector<LocalTarget> dpi_pool_;           // targets owned by the inspection
  std::vector<LocalTarget> unvisited_;
  std::map<int, TargetOutcome> outcomes_;
  bool dpi_started_ = false;
  bool dpi_skipped_ = false;
};

}  // namespace reactsim
