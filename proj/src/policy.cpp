#include "dualight/policy.hpp"

#include <cmath>

#include "dualight/errors.hpp"

namespace dualight::agent {

double epsilon_at(const PolicyConfig& config, uint64_t global_step) {
  const double decayed =
      config.epsilon_start *
      std::pow(config.epsilon_decay, static_cast<double>(global_step));
  return std::max(config.epsilon_min, decayed);
}

int select_action(const Vec& q, const std::array<bool, 8>& valid_mask,
                  double epsilon, Rng& rng) {
  int num_valid = 0;
  for (bool v : valid_mask) num_valid += v ? 1 : 0;
  if (num_valid == 0) throw NoValidPhase("no valid phase to select");

  if (epsilon > 0.0 && rng.uniform() < epsilon) {
    int pick = rng.uniform_int(num_valid);
    for (size_t p = 0; p < valid_mask.size(); ++p) {
      if (!valid_mask[p]) continue;
      if (pick-- == 0) return static_cast<int>(p);
    }
  }

  int best = -1;
  for (size_t p = 0; p < valid_mask.size(); ++p) {
    if (!valid_mask[p]) continue;
    if (best < 0 || q[p] > q[best]) best = static_cast<int>(p);
  }
  return best;
}

}  // namespace dualight::agent
