#pragma once

#include <string>

#include "dualight/model.hpp"

namespace dualight {

/// Binary checkpoint with a versioned header. Holds every tensor, all
/// per-scenario experiential tables, the full Adam state, and the RNG
/// state; save -> load -> save round-trips byte-for-byte.
void save_checkpoint(const Model& model, const std::string& path);
Model load_checkpoint(const std::string& path);

/// Throws CheckpointMismatch unless the checkpoint was trained on the
/// same number of scenarios with the same intersection counts.
void require_compatible(const Model& model, const std::vector<int>& scenario_sizes);

}  // namespace dualight
