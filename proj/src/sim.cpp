#include "dualight/sim.hpp"

#include <algorithm>
#include <cmath>

#include "dualight/errors.hpp"

namespace dualight::simnet {

Sim::Sim(const ScenarioSpec& spec, const ScenarioTables& tables)
    : spec_(&spec), tables_(&tables) {
  reset();
}

void Sim::reset() {
  clock_ = 0;
  cur_phase_.assign(size(), 0);
  for (int i = 0; i < size(); ++i) {
    cur_phase_[i] = tables_->intersections[i].initial_phase;
  }
  queues_.assign(size(), {});
  credit_.assign(size(), {});
  link_head_count_.assign(spec_->links.size(), 0);
  vehicles_.clear();
  records_.clear();
  spawned_ = in_transit_ = queued_ = finished_ = 0;

  // Deterministic spawn schedule: a flow of rate r starts vehicles at
  // start + j * 3600 / r for j = 0, 1, ... while before end.
  spawns_.clear();
  flow_fft_.clear();
  int max_fft = 0;
  for (const auto& link : spec_->links) max_fft = std::max(max_fft, link.free_flow_s);
  for (size_t f = 0; f < spec_->flows.size(); ++f) {
    const FlowSpec& flow = spec_->flows[f];
    int fft = 0;
    for (const RouteHop& hop : flow.route) fft += spec_->links[hop.link].free_flow_s;
    flow_fft_.push_back(fft);
    if (flow.rate_vph <= 0.0) continue;
    const double headway = 3600.0 / flow.rate_vph;
    for (long j = 0;; ++j) {
      const double t = flow.start_s + static_cast<double>(j) * headway;
      if (t >= flow.end_s) break;
      spawns_.push_back({static_cast<int>(std::floor(t)), static_cast<int>(f)});
    }
  }
  std::stable_sort(spawns_.begin(), spawns_.end(),
                   [](const Spawn& a, const Spawn& b) { return a.tick < b.tick; });
  next_spawn_ = 0;

  arrivals_.assign(spec_->episode_length_s + max_fft + 2, {});
}

void Sim::set_phases(const std::vector<int>& joint_action) {
  if (static_cast<int>(joint_action.size()) != size()) {
    throw DimensionMismatch("joint action size " +
                            std::to_string(joint_action.size()) +
                            " != intersection count " + std::to_string(size()));
  }
  for (int i = 0; i < size(); ++i) {
    const int p = joint_action[i];
    if (p < 0 || p >= kNumPhases || !tables_->intersections[i].valid_phase[p]) {
      throw InvalidPhase("phase " + std::to_string(p) +
                         " is not valid for intersection " +
                         std::to_string(tables_->ids[i]));
    }
    cur_phase_[i] = p;
  }
}

void Sim::enqueue_vehicle(int vid, int index, int q, int via_link) {
  queues_[index][q].push_back(vid);
  vehicles_[vid].enqueue_s = clock_;
  vehicles_[vid].via_link = via_link;
  if (via_link >= 0) ++link_head_count_[via_link];
  ++queued_;
}

void Sim::finish_vehicle(int vid) {
  records_[vid].finish_s = clock_;
  ++finished_;
}

void Sim::discharge_queue(int index, int q, double rate) {
  auto& queue = queues_[index][q];
  double& credit = credit_[index][q];
  credit += rate;
  int capacity = static_cast<int>(std::floor(credit));
  credit -= capacity;  // unused capacity does not bank across seconds
  while (capacity > 0 && !queue.empty()) {
    const int vid = queue.front();
    queue.pop_front();
    --capacity;
    Vehicle& v = vehicles_[vid];
    records_[vid].wait_s += clock_ - v.enqueue_s;
    v.enqueue_s = -1;
    if (v.via_link >= 0) --link_head_count_[v.via_link];
    v.via_link = -1;
    --queued_;

    const bool last = v.flow < 0 || v.route_pos + 1 >=
        static_cast<int>(spec_->flows[v.flow].route.size());
    if (last) {
      finish_vehicle(vid);
      continue;
    }
    ++v.route_pos;
    const int link = spec_->flows[v.flow].route[v.route_pos].link;
    const int arrive = clock_ + spec_->links[link].free_flow_s;
    ++in_transit_;
    if (arrive < static_cast<int>(arrivals_.size())) {
      arrivals_[arrive].push_back(vid);
    }
  }
}

void Sim::advance_second() {
  const int now = clock_;

  // 1) spawn vehicles whose departure time has arrived
  while (next_spawn_ < spawns_.size() && spawns_[next_spawn_].tick <= now) {
    const int flow = spawns_[next_spawn_].flow;
    ++next_spawn_;
    const int vid = static_cast<int>(vehicles_.size());
    vehicles_.push_back({flow, 0, -1, -1});
    records_.push_back({vid, now, -1, 0, flow_fft_[flow]});
    ++spawned_;
    ++in_transit_;
    const int link = spec_->flows[flow].route[0].link;
    const int arrive = now + spec_->links[link].free_flow_s;
    if (arrive < static_cast<int>(arrivals_.size())) arrivals_[arrive].push_back(vid);
  }

  // 2) deliver in-transit vehicles whose traversal time has elapsed
  if (now < static_cast<int>(arrivals_.size())) {
    auto& bucket = arrivals_[now];
    std::sort(bucket.begin(), bucket.end());  // same-tick arrivals by id
    for (int vid : bucket) {
      Vehicle& v = vehicles_[vid];
      const RouteHop& hop = spec_->flows[v.flow].route[v.route_pos];
      const auto& binding = tables_->link_bindings[hop.link];
      --in_transit_;
      if (binding.to_index < 0) {
        // downstream end is a boundary: the vehicle leaves the network
        finish_vehicle(vid);
        continue;
      }
      enqueue_vehicle(vid, binding.to_index,
                      queue_of(binding.to_slot, hop.movement), hop.link);
    }
    bucket.clear();
  }

  // 3) discharge: movements of the active phase, and all right turns
  for (int i = 0; i < size(); ++i) {
    const StdIntersection& sd = tables_->intersections[i];
    const auto& phase = kPhaseMovements[cur_phase_[i]];
    for (int q = 0; q < kQueuesPerIntersection; ++q) {
      const int slot = queue_slot_of(q);
      const Turn turn = static_cast<Turn>(q % 3);
      bool green;
      if (turn == Turn::kRight) {
        green = sd.right_present[slot];
      } else {
        const int movement = movement_index(slot, turn);
        green = (movement == phase[0] || movement == phase[1]) &&
                sd.movement_present[movement];
      }
      if (!green) {
        credit_[i][q] = 0.0;
        continue;
      }
      const int in_link = sd.in_link[slot];
      const double rate = in_link >= 0 ? spec_->links[in_link].saturation_vps : 1.0;
      discharge_queue(i, q, rate);
    }
  }

  ++clock_;
  check_conservation();
}

void Sim::check_conservation() const {
  if (spawned_ != in_transit_ + queued_ + finished_) {
    throw Error("vehicle conservation violated at t=" + std::to_string(clock_));
  }
}

Sim::StepResult Sim::step(const std::vector<int>& joint_action) {
  set_phases(joint_action);
  for (int s = 0; s < spec_->decision_interval_s; ++s) advance_second();
  StepResult result;
  result.obs.reserve(size());
  result.rewards.resize(size());
  for (int i = 0; i < size(); ++i) {
    result.obs.push_back(observe(i));
    result.rewards[i] = reward(i);
  }
  return result;
}

Vec Sim::observe(int index) const {
  if (index < 0 || index >= size()) {
    throw UnknownIntersection("intersection index out of range");
  }
  const StdIntersection& sd = tables_->intersections[index];
  Vec obs(kObsDim, 0.0);
  obs[cur_phase_[index]] = 1.0;
  for (int m = 0; m < kNumMovements; ++m) {
    if (!sd.movement_present[m]) continue;  // absent slots read 0
    obs[kNumPhases + m] = static_cast<double>(
        queues_[index][queue_of(movement_slot(m), movement_turn(m))].size());
  }
  return obs;
}

double Sim::reward(int index) const {
  if (index < 0 || index >= size()) {
    throw UnknownIntersection("intersection index out of range");
  }
  const StdIntersection& sd = tables_->intersections[index];
  long stopped = 0;
  for (int m = 0; m < kNumMovements; ++m) {
    if (!sd.movement_present[m]) continue;
    stopped += queues_[index][queue_of(movement_slot(m), movement_turn(m))].size();
  }
  return -kRewardWeight * static_cast<double>(stopped);
}

int Sim::queue_len(int index, int movement) const {
  return static_cast<int>(
      queues_.at(index)[queue_of(movement_slot(movement), movement_turn(movement))]
          .size());
}

int Sim::right_queue_len(int index, int slot) const {
  return static_cast<int>(queues_.at(index)[queue_of(slot, Turn::kRight)].size());
}

std::vector<VehicleRecord> Sim::vehicle_records() const {
  std::vector<VehicleRecord> out = records_;
  for (size_t vid = 0; vid < vehicles_.size(); ++vid) {
    if (vehicles_[vid].enqueue_s >= 0) {
      out[vid].wait_s += clock_ - vehicles_[vid].enqueue_s;
    }
  }
  return out;
}

void Sim::inject_queued(int index, int movement, int n) {
  const StdIntersection& sd = tables_->intersections.at(index);
  if (!sd.movement_present[movement]) {
    throw ValidationError("cannot inject into an absent movement");
  }
  const int slot = movement_slot(movement);
  for (int j = 0; j < n; ++j) {
    const int vid = static_cast<int>(vehicles_.size());
    vehicles_.push_back({-1, 0, -1, -1});
    records_.push_back({vid, clock_, -1, 0, 0});
    ++spawned_;
    enqueue_vehicle(vid, index, queue_of(slot, movement_turn(movement)),
                    sd.in_link[slot]);
  }
}

void Sim::inject_queued_right(int index, int slot, int n) {
  const StdIntersection& sd = tables_->intersections.at(index);
  if (!sd.right_present[slot]) {
    throw ValidationError("cannot inject into an absent right-turn lane");
  }
  for (int j = 0; j < n; ++j) {
    const int vid = static_cast<int>(vehicles_.size());
    vehicles_.push_back({-1, 0, -1, -1});
    records_.push_back({vid, clock_, -1, 0, 0});
    ++spawned_;
    enqueue_vehicle(vid, index, queue_of(slot, Turn::kRight), sd.in_link[slot]);
  }
}

}  // namespace dualight::simnet
