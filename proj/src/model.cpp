#include "dualight/model.hpp"

namespace dualight {

Model init_model(uint64_t seed, const qkernel::DimConfig& dims,
                 const std::vector<int>& scenario_sizes, bool cross_scenario) {
  Model model;
  model.dims = dims;
  model.params = qkernel::init_shared(seed, dims);
  model.target = qkernel::snapshot(model.params);
  model.emb = qkernel::init_experiential(dims, scenario_sizes);
  model.opt = qkernel::AdamState::init(dims, scenario_sizes);
  model.rng = Rng(seed);
  model.cross_scenario = cross_scenario;
  model.scenario_sizes = scenario_sizes;
  return model;
}

}  // namespace dualight
