#pragma once

#include <string>
#include <vector>

#include "dualight/baselines.hpp"
#include "dualight/metrics.hpp"
#include "dualight/model.hpp"
#include "dualight/sim.hpp"
#include "dualight/xscen.hpp"

namespace dualight::evalkit {

enum class PolicyKind { kDuaLight, kFtc, kMaxPressure, kRandom };

PolicyKind parse_policy(const std::string& name);

/// Neighbor observations for agent (k, i): the same-scenario neighbor
/// slots (SELF padding contributes the agent's own observation) plus,
/// when a cross map is given, the cross-scenario slots read from the
/// other scenarios' observations at the same decision step.
std::vector<Vec> gather_neighbor_obs(
    const std::vector<std::vector<Vec>>& obs_all,
    const simnet::ScenarioTables& tables, int scenario, int intersection,
    const xscen::CrossNeighborMap* cross);

/// Greedy Q action under the main parameters, restricted to valid phases.
int greedy_action(const Model& model, int scenario, int intersection,
                  const Vec& obs_self, std::span<const Vec> neighbor_obs,
                  const std::array<bool, 8>& valid_mask);

/// One full episode under the given policy; deterministic given the seed
/// (the seed only matters for the random policy). For kDuaLight the model
/// runs greedily with frozen experiential tables. Throws
/// CheckpointMismatch when the model does not fit the scenario.
MetricsReport run_episode(const simnet::ScenarioSpec& spec,
                          const simnet::ScenarioTables& tables, PolicyKind kind,
                          const Model* model, int scenario_index, uint64_t seed,
                          int steps_override = 0);

/// Greedy episode over all scenarios stepped in lockstep, sharing
/// observations through the cross map (the cross-scenario mode).
std::vector<MetricsReport> run_episode_lockstep(
    const std::vector<simnet::ScenarioSpec>& specs,
    const std::vector<simnet::ScenarioTables>& tables, const Model& model,
    const xscen::CrossNeighborMap& cross, int steps_override = 0);

/// Rebuilds the cross-neighbor map the way training does at episode
/// boundaries: one greedy warm-up episode provides the end-of-episode
/// observations that feed the similarity search.
xscen::CrossNeighborMap refresh_cross_map_for_eval(
    const std::vector<simnet::ScenarioSpec>& specs,
    const std::vector<simnet::ScenarioTables>& tables, const Model& model);

/// Greedy rollout dumping, for every agent and every decision step in
/// [window_lo, window_hi], the pre-head concatenation of the attention-
/// pooled features and the weighted self features, as TSV with
/// (scenario, intersection, step) labels.
void dump_embeddings(const Model& model,
                     const std::vector<simnet::ScenarioSpec>& specs,
                     const std::vector<simnet::ScenarioTables>& tables,
                     int window_lo, int window_hi, const std::string& path);

}  // namespace dualight::evalkit
