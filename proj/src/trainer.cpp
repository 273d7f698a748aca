#include "dualight/trainer.hpp"

#include <algorithm>
#include <fstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "dualight/errors.hpp"
#include "dualight/runner.hpp"
#include "dualight/sim.hpp"

namespace dualight::trainer {

using simnet::Sim;
using simnet::StdIntersection;

std::vector<double> td_targets(const std::vector<const Transition*>& batch,
                               const qkernel::SharedParams& target_params,
                               const qkernel::ExperientialWeights& emb,
                               double gamma) {
  if (batch.empty()) throw EmptyBuffer("td_targets on an empty batch");
  std::vector<double> targets;
  targets.reserve(batch.size());
  for (const Transition* t : batch) {
    const auto cache =
        qkernel::forward(target_params, emb, t->scenario, t->intersection,
                         t->next_obs, t->next_neighbor_obs);
    double best = 0.0;
    bool any = false;
    for (int p = 0; p < 8; ++p) {
      if (!t->valid_mask[p]) continue;
      if (!any || cache.q[p] > best) {
        best = cache.q[p];
        any = true;
      }
    }
    if (!any) throw NoValidPhase("transition with no valid phase");
    targets.push_back(t->reward + gamma * best);
  }
  return targets;
}

LossGrads loss_and_grads(const std::vector<const Transition*>& batch,
                         const qkernel::SharedParams& params,
                         const qkernel::SharedParams& target_params,
                         const qkernel::ExperientialWeights& emb, double gamma) {
  const std::vector<double> targets = td_targets(batch, target_params, emb, gamma);
  LossGrads out;
  out.grads = qkernel::GradientSet::zeros(params.dims);
  const double inv_batch = 1.0 / static_cast<double>(batch.size());
  for (size_t b = 0; b < batch.size(); ++b) {
    const Transition* t = batch[b];
    const auto cache = qkernel::forward(params, emb, t->scenario, t->intersection,
                                        t->obs, t->neighbor_obs);
    const double err = cache.q[t->action] - targets[b];
    out.loss += 0.5 * err * err;
    if (err != 0.0) {
      Vec dq(params.dims.num_phases, 0.0);
      dq[t->action] = err * inv_batch;
      qkernel::backward_into(cache, dq, out.grads);
    }
  }
  out.loss *= inv_batch;
  return out;
}

double update_embeddings(Model& model, int scenario,
                         const std::vector<const Transition*>& batch,
                         const TrainConfig& config) {
  for (const Transition* t : batch) {
    if (t->scenario != scenario) {
      throw MixedScenarioBatch("batch holds transitions from scenario " +
                               std::to_string(t->scenario) + ", expected " +
                               std::to_string(scenario));
    }
  }
  LossGrads lg =
      loss_and_grads(batch, model.params, model.target, model.emb, config.gamma);
  if (!config.disable_experiential) {
    qkernel::AdamConfig adam{config.lr};
    qkernel::adam_step_embeddings(model.emb, lg.grads, adam, model.opt,
                                  !config.disable_intersection_wise,
                                  !config.disable_feature_wise);
  }
  return lg.loss;
}

double update_shared(Model& model, const std::vector<const Transition*>& batch,
                     const TrainConfig& config) {
  LossGrads lg =
      loss_and_grads(batch, model.params, model.target, model.emb, config.gamma);
  qkernel::AdamConfig adam{config.lr};
  qkernel::adam_step_shared(model.params, lg.grads, adam, model.opt);
  return lg.loss;
}

void sync_target(Model& model) { qkernel::load(model.target, model.params); }

namespace {

struct ScenarioRuntime {
  const simnet::ScenarioSpec* spec;
  simnet::ScenarioTables tables;
  std::vector<std::array<bool, 8>> masks;
};

std::vector<Vec> observe_all(const Sim& sim) {
  std::vector<Vec> obs;
  obs.reserve(sim.size());
  for (int i = 0; i < sim.size(); ++i) obs.push_back(sim.observe(i));
  return obs;
}

void validate_config(const std::vector<simnet::ScenarioSpec>& scenarios,
                     const TrainConfig& config) {
  if (scenarios.empty()) throw ValidationError("need at least one scenario");
  for (const auto& s : scenarios) {
    if (s.episode_length_s != scenarios[0].episode_length_s ||
        s.decision_interval_s != scenarios[0].decision_interval_s) {
      throw ValidationError(
          "co-trained scenarios must share episode length and decision "
          "interval");
    }
  }
  if (config.episodes <= 0 || config.batch_size <= 0) {
    throw ValidationError("episodes and batch size must be positive");
  }
  if (config.gamma <= 0.0 || config.gamma >= 1.0) {
    throw ValidationError("gamma must lie in (0, 1)");
  }
  if (config.parallel && config.cross_scenario) {
    throw ValidationError(
        "parallel rollouts are incompatible with cross-scenario "
        "aggregation (scenarios step in lockstep)");
  }
  if (config.parallel && config.m2_period_steps > 0) {
    throw ValidationError(
        "parallel rollouts require shared updates at episode boundaries "
        "only (m2_period_steps = 0)");
  }
}

}  // namespace

TrainResult train(const std::vector<simnet::ScenarioSpec>& scenarios,
                  const TrainConfig& config, uint64_t seed) {
  validate_config(scenarios, config);
  const int num_scenarios = static_cast<int>(scenarios.size());

  std::vector<ScenarioRuntime> runtime;
  std::vector<int> sizes;
  for (const auto& spec : scenarios) {
    ScenarioRuntime rt;
    rt.spec = &spec;
    rt.tables = simnet::build_tables(spec);
    for (const auto& sd : rt.tables.intersections) {
      std::array<bool, 8> mask{};
      for (int p = 0; p < simnet::kNumPhases; ++p) mask[p] = sd.valid_phase[p];
      rt.masks.push_back(mask);
    }
    sizes.push_back(rt.tables.size());
    runtime.push_back(std::move(rt));
  }

  qkernel::DimConfig dims;
  dims.num_neighbors =
      config.cross_scenario ? xscen::kTotalNeighbors : simnet::kNumNeighbors;

  TrainResult result;
  result.model = init_model(seed, dims, sizes, config.cross_scenario);
  Model& model = result.model;

  const int steps = config.steps_per_episode > 0 ? config.steps_per_episode
                                                 : scenarios[0].num_steps();
  const int batch = config.batch_size;

  ReplayBuffer buffer(num_scenarios, config.replay_capacity);
  xscen::CrossNeighborMap cross_map;
  std::vector<std::vector<Vec>> last_obs(num_scenarios);

  long m2_counter = 0;

  for (int episode = 1; episode <= config.episodes; ++episode) {
    const uint64_t episode_seed = model.rng.next_u64();
    std::vector<Rng> rng_k;
    for (int k = 0; k < num_scenarios; ++k) {
      rng_k.emplace_back(episode_seed * 0x9e3779b97f4a7c15ULL + k);
    }
    Rng rng_m2(episode_seed ^ 0xc2b2ae3d27d4eb4fULL);

    std::vector<Sim> sims;
    sims.reserve(num_scenarios);
    std::vector<std::vector<Vec>> obs_all(num_scenarios);
    for (int k = 0; k < num_scenarios; ++k) {
      sims.emplace_back(*runtime[k].spec, runtime[k].tables);
      obs_all[k] = observe_all(sims[k]);
    }

    if (config.cross_scenario) {
      // Episode-boundary refresh: similarity over the feature embeddings
      // of the previous episode's final observations (initial ones for
      // the first episode), under the current shared parameters.
      const auto& source = last_obs[0].empty() ? obs_all : last_obs;
      cross_map = xscen::build_cross_map(
          xscen::embed_observations(model.params, source),
          xscen::kCrossNeighbors, model.global_step);
    }
    const xscen::CrossNeighborMap* cross_ptr =
        config.cross_scenario ? &cross_map : nullptr;

    std::vector<double> m1_loss_sum(num_scenarios, 0.0);
    std::vector<long> m1_loss_count(num_scenarios, 0);
    double m2_loss_sum = 0.0;
    long m2_loss_count = 0;

    auto maybe_update_m1 = [&](int k, int t) {
      if (config.disable_experiential) return;
      if (config.m1_period_steps <= 0 || (t + 1) % config.m1_period_steps != 0) return;
      if (buffer.size(k) < batch) return;
      const auto m1 = buffer.sample_m1(k, batch, rng_k[k]);
      m1_loss_sum[k] += update_embeddings(model, k, m1, config);
      m1_loss_count[k] += 1;
    };

    auto run_m2_update = [&]() {
      if (buffer.total_size() < batch) return;
      std::vector<const Transition*> m2;
      if (config.disable_cotrain) {
        // One scenario at a time, rotating: shared learning never mixes
        // scenarios within an update.
        int k = static_cast<int>(m2_counter % num_scenarios);
        for (int probe = 0; probe < num_scenarios; ++probe) {
          if (buffer.size((k + probe) % num_scenarios) > 0) {
            k = (k + probe) % num_scenarios;
            break;
          }
        }
        m2 = buffer.sample_m1(k, batch, rng_m2);
      } else {
        m2 = buffer.sample_m2(batch, rng_m2);
      }
      m2_loss_sum += update_shared(model, m2, config);
      m2_loss_count += 1;
      m2_counter += 1;
    };

    auto rollout_scenario = [&](int k, int t, double eps,
                                const std::vector<std::vector<Vec>>* snapshot) {
      Sim& sim = sims[k];
      const auto& obs_src = snapshot ? *snapshot : obs_all;
      std::vector<int> actions(sim.size());
      std::vector<std::vector<Vec>> neigh(sim.size());
      for (int i = 0; i < sim.size(); ++i) {
        neigh[i] = evalkit::gather_neighbor_obs(obs_src, runtime[k].tables, k, i,
                                                cross_ptr);
        const auto cache = qkernel::forward(model.params, model.emb, k, i,
                                            obs_src[k][i], neigh[i]);
        actions[i] =
            agent::select_action(cache.q, runtime[k].masks[i], eps, rng_k[k]);
      }
      auto step_result = sim.step(actions);

      if (!config.cross_scenario) {
        // Next-step neighbor observations are all within this scenario,
        // so transitions complete immediately.
        std::vector<std::vector<Vec>> next_all(num_scenarios);
        next_all[k] = step_result.obs;
        for (int i = 0; i < sim.size(); ++i) {
          Transition tr;
          tr.scenario = k;
          tr.intersection = i;
          tr.step = t;
          tr.valid_mask = runtime[k].masks[i];
          tr.action = actions[i];
          tr.reward = step_result.rewards[i];
          tr.obs = obs_src[k][i];
          tr.neighbor_obs = std::move(neigh[i]);
          tr.next_obs = step_result.obs[i];
          tr.next_neighbor_obs =
              evalkit::gather_neighbor_obs(next_all, runtime[k].tables, k, i,
                                           nullptr);
          buffer.push(std::move(tr));
        }
        obs_all[k] = std::move(step_result.obs);
      } else {
        obs_all[k] = std::move(step_result.obs);
      }
      return std::make_pair(std::move(actions), std::move(step_result.rewards));
    };

    for (int t = 0; t < steps; ++t) {
      const double eps = agent::epsilon_at(config.policy, model.global_step);

      if (!config.cross_scenario) {
        if (config.parallel && num_scenarios > 1) {
          // Rollouts mutate disjoint state per scenario (its simulator,
          // its buffer ring, its experiential rows); shared parameters
          // are read-only inside the step.
          std::vector<std::thread> workers;
          for (int k = 0; k < num_scenarios; ++k) {
            workers.emplace_back([&, k] {
              rollout_scenario(k, t, eps, nullptr);
              maybe_update_m1(k, t);
            });
          }
          for (auto& w : workers) w.join();
        } else {
          for (int k = 0; k < num_scenarios; ++k) {
            rollout_scenario(k, t, eps, nullptr);
            maybe_update_m1(k, t);
          }
        }
      } else {
        // Lockstep: all scenarios observe the same decision instant, act,
        // then transitions are completed from the post-step snapshot.
        const std::vector<std::vector<Vec>> snapshot = obs_all;
        std::vector<std::vector<int>> actions(num_scenarios);
        std::vector<std::vector<double>> rewards(num_scenarios);
        for (int k = 0; k < num_scenarios; ++k) {
          auto [a, r] = rollout_scenario(k, t, eps, &snapshot);
          actions[k] = std::move(a);
          rewards[k] = std::move(r);
        }
        for (int k = 0; k < num_scenarios; ++k) {
          for (int i = 0; i < sims[k].size(); ++i) {
            Transition tr;
            tr.scenario = k;
            tr.intersection = i;
            tr.step = t;
            tr.valid_mask = runtime[k].masks[i];
            tr.action = actions[k][i];
            tr.reward = rewards[k][i];
            tr.obs = snapshot[k][i];
            tr.neighbor_obs =
                evalkit::gather_neighbor_obs(snapshot, runtime[k].tables, k, i,
                                             cross_ptr);
            tr.next_obs = obs_all[k][i];
            tr.next_neighbor_obs =
                evalkit::gather_neighbor_obs(obs_all, runtime[k].tables, k, i,
                                             cross_ptr);
            buffer.push(std::move(tr));
          }
          maybe_update_m1(k, t);
        }
      }

      model.global_step += 1;
      if (config.m2_period_steps > 0 &&
          model.global_step % config.m2_period_steps == 0) {
        run_m2_update();
      }
    }

    for (int u = 0; u < config.m2_updates_per_episode; ++u) run_m2_update();

    if (config.target_sync_episodes > 0 &&
        episode % config.target_sync_episodes == 0) {
      sync_target(model);
    }

    last_obs = obs_all;
    model.episodes_done = episode;

    if (config.eval_interval > 0 && episode % config.eval_interval == 0) {
      const double eps_now = agent::epsilon_at(config.policy, model.global_step);
      const double m2_mean =
          m2_loss_count > 0 ? m2_loss_sum / static_cast<double>(m2_loss_count) : 0.0;
      std::vector<evalkit::MetricsReport> reports;
      if (config.cross_scenario) {
        std::vector<simnet::ScenarioTables> tables;
        for (auto& rt : runtime) tables.push_back(rt.tables);
        reports = evalkit::run_episode_lockstep(scenarios, tables, model,
                                                cross_map, steps);
      } else {
        for (int k = 0; k < num_scenarios; ++k) {
          reports.push_back(evalkit::run_episode(*runtime[k].spec,
                                                 runtime[k].tables,
                                                 evalkit::PolicyKind::kDuaLight,
                                                 &model, k, 0, steps));
        }
      }
      for (int k = 0; k < num_scenarios; ++k) {
        EpisodeRecord rec;
        rec.episode = episode;
        rec.scenario = k;
        rec.avg_delay = reports[k].avg_delay_s;
        rec.avg_trip = reports[k].avg_trip_s;
        rec.avg_wait = reports[k].avg_wait_s;
        rec.loss_m1 = m1_loss_count[k] > 0
                          ? m1_loss_sum[k] / static_cast<double>(m1_loss_count[k])
                          : 0.0;
        rec.loss_m2 = m2_mean;
        rec.epsilon = eps_now;
        rec.cross_scenario = config.cross_scenario;
        result.records.push_back(rec);
      }
    }
  }

  return result;
}

void write_metrics_log(const std::vector<EpisodeRecord>& records,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open metrics log '" + path + "' for writing");
  for (const auto& rec : records) {
    nlohmann::json j;
    j["episode"] = rec.episode;
    j["scenario"] = rec.scenario;
    j["avg_delay"] = rec.avg_delay;
    j["avg_trip"] = rec.avg_trip;
    j["avg_wait"] = rec.avg_wait;
    j["loss_m1"] = rec.loss_m1;
    j["loss_m2"] = rec.loss_m2;
    j["epsilon"] = rec.epsilon;
    j["mode"] = rec.cross_scenario ? "xscen" : "base";
    out << j.dump() << "\n";
  }
  if (!out) throw Error("failed writing metrics log '" + path + "'");
}

}  // namespace dualight::trainer
