#pragma once

#include <cstdint>
#include <vector>

#include "dualight/adam.hpp"
#include "dualight/qnet.hpp"
#include "dualight/rng.hpp"

namespace dualight {

/// The full learnable state: shared parameters, their frozen target-copy,
/// per-scenario experiential tables, optimizer state, and the training
/// RNG. Checkpoints serialize this struct exactly.
struct Model {
  qkernel::DimConfig dims;
  qkernel::SharedParams params;
  qkernel::SharedParams target;
  qkernel::ExperientialWeights emb;
  qkernel::AdamState opt;
  Rng rng;
  uint64_t global_step = 0;
  uint32_t episodes_done = 0;
  bool cross_scenario = false;
  std::vector<int> scenario_sizes;
};

Model init_model(uint64_t seed, const qkernel::DimConfig& dims,
                 const std::vector<int>& scenario_sizes, bool cross_scenario);

}  // namespace dualight
