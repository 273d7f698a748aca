#pragma once

#include <array>
#include <deque>
#include <vector>

#include "dualight/linalg.hpp"
#include "dualight/scenario.hpp"
#include "dualight/standardize.hpp"

namespace dualight::simnet {

/// Punishment coefficient on stopped vehicles in the reward.
inline constexpr double kRewardWeight = 0.25;

/// Observation layout: entries 0..7 one-hot current phase, entries 8..15
/// stopped-vehicle count per canonical movement (absent movements read 0).
inline constexpr int kObsDim = kNumPhases + kNumMovements;

struct VehicleRecord {
  int id = 0;
  int spawn_s = 0;
  int finish_s = -1;      // -1 while unfinished
  int wait_s = 0;         // seconds spent in movement queues
  int free_flow_s = 0;    // sum of the route's link free-flow times
};

/// Deterministic discrete-time point-queue traffic simulator. Vehicles
/// traverse links in fixed free-flow time, wait in per-movement FIFO
/// queues at the downstream junction, and discharge at the entrance
/// link's saturation rate while their movement has green. Right turns
/// discharge unconditionally. One instance is single-writer; distinct
/// instances are independent.
class Sim {
 public:
  Sim(const ScenarioSpec& spec, const ScenarioTables& tables);

  void reset();

  int clock() const { return clock_; }
  int size() const { return tables_->size(); }
  int num_steps() const { return spec_->num_steps(); }

  struct StepResult {
    std::vector<Vec> obs;
    std::vector<double> rewards;
  };

  /// Applies the joint phase selection and advances one decision
  /// interval. Observations and rewards are taken at the post-step
  /// instant. Throws InvalidPhase when an action selects a phase that is
  /// not valid for its intersection.
  StepResult step(const std::vector<int>& joint_action);

  // Second-level granularity, exposed so callers can interleave their
  // own checks between ticks. step() == set_phases + dt x advance_second.
  void set_phases(const std::vector<int>& joint_action);
  void advance_second();

  Vec observe(int index) const;
  double reward(int index) const;
  Vec observe_id(int id) const { return observe(tables_->index_of(id)); }
  double reward_id(int id) const { return reward(tables_->index_of(id)); }

  int current_phase(int index) const { return cur_phase_.at(index); }

  int queue_len(int index, int movement) const;
  int right_queue_len(int index, int slot) const;
  /// Vehicles currently queued at the downstream junction that arrived
  /// via this link (the point-queue at the link head).
  int queued_at_link_head(int link) const { return link_head_count_.at(link); }

  // Conservation counters: spawned == in_transit + queued + finished at
  // every instant (checked after each tick).
  long spawned() const { return spawned_; }
  long in_transit() const { return in_transit_; }
  long queued() const { return queued_; }
  long finished() const { return finished_; }

  /// Per-vehicle logs at the current instant; vehicles still in a queue
  /// include their in-progress waiting time.
  std::vector<VehicleRecord> vehicle_records() const;

  const ScenarioTables& tables() const { return *tables_; }
  const ScenarioSpec& scenario() const { return *spec_; }

  /// Test hook: place n synthetic vehicles on a movement queue. They are
  /// counted as spawned and finish when discharged.
  void inject_queued(int index, int movement, int n);
  void inject_queued_right(int index, int slot, int n);

 private:
  struct Vehicle {
    int flow = -1;       // -1 for injected vehicles
    int route_pos = 0;
    int enqueue_s = -1;  // -1 while in transit
    int via_link = -1;   // link whose head queue the vehicle occupies
  };
  struct Spawn {
    int tick;
    int flow;
  };

  static constexpr int kQueuesPerIntersection = kNumSlots * 3;
  static int queue_slot_of(int q) { return q / 3; }
  static int queue_of(int slot, Turn t) { return slot * 3 + static_cast<int>(t); }

  void enqueue_vehicle(int vid, int index, int q, int via_link);
  void discharge_queue(int index, int q, double rate);
  void finish_vehicle(int vid);
  void check_conservation() const;

  const ScenarioSpec* spec_;
  const ScenarioTables* tables_;

  int clock_ = 0;
  std::vector<int> cur_phase_;
  std::vector<std::array<std::deque<int>, kQueuesPerIntersection>> queues_;
  std::vector<std::array<double, kQueuesPerIntersection>> credit_;
  std::vector<int> link_head_count_;

  std::vector<Spawn> spawns_;   // sorted by tick, then flow order
  size_t next_spawn_ = 0;
  std::vector<int> flow_fft_;   // free-flow route time per flow

  std::vector<Vehicle> vehicles_;
  std::vector<VehicleRecord> records_;
  std::vector<std::vector<int>> arrivals_;  // by absolute tick

  long spawned_ = 0;
  long in_transit_ = 0;
  long queued_ = 0;
  long finished_ = 0;
};

}  // namespace dualight::simnet
