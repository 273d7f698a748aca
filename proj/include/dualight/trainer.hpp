#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dualight/model.hpp"
#include "dualight/policy.hpp"
#include "dualight/replay.hpp"
#include "dualight/scenario.hpp"
#include "dualight/standardize.hpp"

namespace dualight::trainer {

struct TrainConfig {
  int episodes = 200;              // L
  int steps_per_episode = 0;       // T; 0 derives it from the scenario
  int batch_size = 20;             // B
  double gamma = 0.95;
  double lr = 0.001;
  int target_sync_episodes = 5;
  int replay_capacity = 10000;     // per scenario

  // Update cadence. Defaults follow the training loop as stated: the
  // per-scenario experiential step runs inside the per-step scenario
  // loop, the shared step once at episode end. Both are configurable.
  int m1_period_steps = 1;         // 0 disables experiential updates entirely
  int m2_period_steps = 0;         // >0: shared update every n decision steps
  int m2_updates_per_episode = 1;  // shared updates at episode end

  agent::PolicyConfig policy{};
  int eval_interval = 1;           // greedy evaluation every n episodes

  // Ablations.
  bool disable_cotrain = false;            // shared updates use one scenario at a time
  bool disable_experiential = false;       // both tables frozen at all-ones
  bool disable_intersection_wise = false;  // intersection table frozen
  bool disable_feature_wise = false;       // feature table frozen

  bool cross_scenario = false;     // aggregate top-5 similar agents from other scenarios
  bool parallel = false;           // roll scenarios on threads (base mode only)

  // Called after each episode's updates and target sync; instrumentation
  // only, never part of the training computation.
  std::function<void(int episode, const Model& model)> episode_hook;
};

/// One metrics-log record, written per (episode, scenario) after the
/// greedy evaluation rollout.
struct EpisodeRecord {
  int episode = 0;
  int scenario = 0;
  double avg_delay = 0.0;
  double avg_trip = 0.0;
  double avg_wait = 0.0;
  double loss_m1 = 0.0;   // mean experiential-update loss this episode
  double loss_m2 = 0.0;   // mean shared-update loss this episode
  double epsilon = 0.0;
  bool cross_scenario = false;
};

/// y = r + gamma * max over the next state's valid phases of the target
/// network's Q. The embeddings are read as-is and treated as frozen.
std::vector<double> td_targets(const std::vector<const Transition*>& batch,
                               const qkernel::SharedParams& target_params,
                               const qkernel::ExperientialWeights& emb,
                               double gamma);

struct LossGrads {
  double loss = 0.0;
  qkernel::GradientSet grads;
};

/// Mean over the batch of 0.5 * (Q(o_t)[a_t] - y)^2 and its gradients;
/// the targets are constants, so gradients flow only through Q(o_t)[a_t].
LossGrads loss_and_grads(const std::vector<const Transition*>& batch,
                         const qkernel::SharedParams& params,
                         const qkernel::SharedParams& target_params,
                         const qkernel::ExperientialWeights& emb, double gamma);

/// Adam step on scenario k's experiential rows only; shared parameters
/// and other scenarios' tables are untouched bitwise. Honors the ablation
/// flags. Returns the batch loss. Throws MixedScenarioBatch if the batch
/// holds another scenario's transitions.
double update_embeddings(Model& model, int scenario,
                         const std::vector<const Transition*>& batch,
                         const TrainConfig& config);

/// Adam step on the shared tensors only; every experiential table is
/// untouched bitwise. Returns the batch loss.
double update_shared(Model& model, const std::vector<const Transition*>& batch,
                     const TrainConfig& config);

void sync_target(Model& model);

struct TrainResult {
  Model model;
  std::vector<EpisodeRecord> records;
};

/// The full training loop: per episode, per decision step, per scenario —
/// observe, act epsilon-greedily over valid phases, step the simulator,
/// store transitions, update that scenario's experiential rows; at
/// episode end update the shared parameters, sync the target network on
/// its period, and log greedy-evaluation metrics.
TrainResult train(const std::vector<simnet::ScenarioSpec>& scenarios,
                  const TrainConfig& config, uint64_t seed);

/// Line-delimited JSON records; byte-stable across reruns of the same
/// seeded config.
void write_metrics_log(const std::vector<EpisodeRecord>& records,
                       const std::string& path);

}  // namespace dualight::trainer
