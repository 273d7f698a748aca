#pragma once

#include <array>
#include <vector>

#include "dualight/linalg.hpp"
#include "dualight/rng.hpp"

namespace dualight::trainer {

/// One stored interaction. Neighbor observations are captured at store
/// time for both endpoints so that sampling is self-contained.
struct Transition {
  int scenario = 0;
  int intersection = 0;
  int step = 0;
  std::array<bool, 8> valid_mask{};
  int action = 0;
  double reward = 0.0;
  Vec obs;
  std::vector<Vec> neighbor_obs;
  Vec next_obs;
  std::vector<Vec> next_neighbor_obs;
};

/// Per-scenario ring buffers with FIFO eviction. Buffers never exchange
/// items between scenarios.
class ReplayBuffer {
 public:
  ReplayBuffer(int num_scenarios, int capacity_per_scenario);

  void push(Transition t);

  /// B transitions sampled uniformly with replacement from scenario k.
  std::vector<const Transition*> sample_m1(int scenario, int batch, Rng& rng) const;

  /// B transitions: per draw a scenario is chosen uniformly among the
  /// non-empty ones, then a transition uniformly within it.
  std::vector<const Transition*> sample_m2(int batch, Rng& rng) const;

  int size(int scenario) const;
  long total_size() const;
  int capacity() const { return capacity_; }

 private:
  int capacity_;
  std::vector<std::vector<Transition>> rings_;
  std::vector<int> heads_;
};

}  // namespace dualight::trainer
