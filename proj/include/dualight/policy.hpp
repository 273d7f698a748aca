#pragma once

#include <array>
#include <cstdint>

#include "dualight/linalg.hpp"
#include "dualight/rng.hpp"

namespace dualight::agent {

struct PolicyConfig {
  double epsilon_start = 0.8;
  double epsilon_min = 0.1;
  double epsilon_decay = 0.999;  // multiplicative, per decision step
  bool greedy = false;           // evaluation mode: epsilon forced to 0
};

/// max(epsilon_min, epsilon_start * decay^step); non-increasing in step.
double epsilon_at(const PolicyConfig& config, uint64_t global_step);

/// Epsilon-greedy over the valid phases only: with probability epsilon a
/// uniform valid phase, otherwise the argmax of q restricted to valid
/// phases, ties to the lowest index. Invalid phases are never returned.
int select_action(const Vec& q, const std::array<bool, 8>& valid_mask,
                  double epsilon, Rng& rng);

}  // namespace dualight::agent
