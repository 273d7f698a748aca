#pragma once

#include <cstdint>
#include <vector>

#include "dualight/qnet.hpp"

namespace dualight::qkernel {

struct AdamConfig {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct Moments {
  Vec m;
  Vec v;
  uint64_t t = 0;
};

/// Optimizer state: one moment pair per shared tensor, and one per
/// experiential row. Rows keep their own step counters so that a row
/// that was never touched by a gradient keeps bias correction consistent
/// with its own update history.
struct AdamState {
  Moments w_feat, b_feat, w_att, w_out, b_out;
  std::vector<Moments> w_head;
  std::vector<std::vector<Moments>> int_rows;  // [scenario][row]
  std::vector<std::vector<Moments>> fea_rows;

  static AdamState init(const DimConfig& dims, const std::vector<int>& scenario_sizes);
};

/// Adam step on the shared tensors only; experiential tables untouched.
void adam_step_shared(SharedParams& params, const GradientSet& grads,
                      const AdamConfig& cfg, AdamState& state);

/// Adam step on the experiential rows present in `grads` only (absent
/// rows keep values and moment estimates). The update_* flags drop one
/// table's gradients, for the ablated variants.
void adam_step_embeddings(ExperientialWeights& emb, const GradientSet& grads,
                          const AdamConfig& cfg, AdamState& state,
                          bool update_intersection = true, bool update_feature = true);

/// Combined step over both parameter groups.
void adam_step(SharedParams& params, ExperientialWeights& emb,
               const GradientSet& grads, const AdamConfig& cfg, AdamState& state);

}  // namespace dualight::qkernel
