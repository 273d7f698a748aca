#include "dualight/runner.hpp"

#include <charconv>
#include <fstream>

#include "dualight/errors.hpp"
#include "dualight/policy.hpp"

namespace dualight::evalkit {

using simnet::Sim;
using simnet::StdIntersection;

PolicyKind parse_policy(const std::string& name) {
  if (name == "dualight") return PolicyKind::kDuaLight;
  if (name == "ftc") return PolicyKind::kFtc;
  if (name == "maxpressure") return PolicyKind::kMaxPressure;
  if (name == "random") return PolicyKind::kRandom;
  throw ValidationError("unknown policy '" + name + "'");
}

std::vector<Vec> gather_neighbor_obs(
    const std::vector<std::vector<Vec>>& obs_all,
    const simnet::ScenarioTables& tables, int scenario, int intersection,
    const xscen::CrossNeighborMap* cross) {
  const StdIntersection& sd = tables.intersections[intersection];
  std::vector<Vec> out;
  out.reserve(sd.neighbors.size() + (cross ? xscen::kCrossNeighbors : 0));
  const Vec& self = obs_all[scenario][intersection];
  for (int n : sd.neighbors) {
    out.push_back(n == simnet::kSelf ? self : obs_all[scenario][n]);
  }
  if (cross != nullptr) {
    for (const auto& ref : cross->entries[scenario][intersection]) {
      out.push_back(ref.scenario < 0 ? self
                                     : obs_all[ref.scenario][ref.intersection]);
    }
  }
  return out;
}

int greedy_action(const Model& model, int scenario, int intersection,
                  const Vec& obs_self, std::span<const Vec> neighbor_obs,
                  const std::array<bool, 8>& valid_mask) {
  const auto cache = qkernel::forward(model.params, model.emb, scenario,
                                      intersection, obs_self, neighbor_obs);
  Rng unused(0);
  return agent::select_action(cache.q, valid_mask, 0.0, unused);
}

namespace {

std::array<bool, 8> valid_mask_of(const StdIntersection& sd) {
  std::array<bool, 8> mask{};
  for (int p = 0; p < simnet::kNumPhases; ++p) mask[p] = sd.valid_phase[p];
  return mask;
}

std::vector<Vec> observe_all(const Sim& sim) {
  std::vector<Vec> obs;
  obs.reserve(sim.size());
  for (int i = 0; i < sim.size(); ++i) obs.push_back(sim.observe(i));
  return obs;
}

void format_double(std::string& out, double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, end);
}

}  // namespace

MetricsReport run_episode(const simnet::ScenarioSpec& spec,
                          const simnet::ScenarioTables& tables, PolicyKind kind,
                          const Model* model, int scenario_index, uint64_t seed,
                          int steps_override) {
  if (kind == PolicyKind::kDuaLight) {
    if (model == nullptr) throw ValidationError("dualight policy needs a model");
    if (scenario_index < 0 || scenario_index >= model->emb.num_scenarios() ||
        model->emb.intersection_w[scenario_index].rows != tables.size()) {
      throw CheckpointMismatch("model does not match scenario " +
                               std::to_string(scenario_index));
    }
    if (model->cross_scenario) {
      throw ValidationError(
          "cross-scenario checkpoints evaluate in lockstep over all "
          "their scenarios");
    }
  }

  Sim sim(spec, tables);
  Rng rng(seed);
  std::vector<baselines::FtcSchedule> schedules;
  if (kind == PolicyKind::kFtc) {
    for (const auto& sd : tables.intersections) {
      schedules.push_back(baselines::ftc_schedule_for(spec, sd));
    }
  }

  const int steps = steps_override > 0 ? steps_override : spec.num_steps();
  std::vector<Vec> obs = observe_all(sim);
  std::vector<int> actions(sim.size());
  std::vector<std::vector<Vec>> obs_all(1);

  for (int t = 0; t < steps; ++t) {
    for (int i = 0; i < sim.size(); ++i) {
      const StdIntersection& sd = tables.intersections[i];
      switch (kind) {
        case PolicyKind::kDuaLight: {
          obs_all[0] = obs;
          const auto neigh = gather_neighbor_obs(obs_all, tables, 0, i, nullptr);
          actions[i] = greedy_action(*model, scenario_index, i, obs[i], neigh,
                                     valid_mask_of(sd));
          break;
        }
        case PolicyKind::kFtc:
          actions[i] = baselines::ftc_policy(schedules[i], sim.clock());
          break;
        case PolicyKind::kMaxPressure:
          actions[i] = baselines::max_pressure_policy(sim, i);
          break;
        case PolicyKind::kRandom: {
          const auto mask = valid_mask_of(sd);
          actions[i] = agent::select_action(Vec(8, 0.0), mask, 1.0, rng);
          break;
        }
      }
    }
    obs = sim.step(actions).obs;
  }

  return compute_metrics(sim.vehicle_records(), steps * spec.decision_interval_s);
}

std::vector<MetricsReport> run_episode_lockstep(
    const std::vector<simnet::ScenarioSpec>& specs,
    const std::vector<simnet::ScenarioTables>& tables, const Model& model,
    const xscen::CrossNeighborMap& cross, int steps_override) {
  const int num_scenarios = static_cast<int>(specs.size());
  std::vector<Sim> sims;
  sims.reserve(num_scenarios);
  std::vector<std::vector<Vec>> obs_all(num_scenarios);
  for (int k = 0; k < num_scenarios; ++k) {
    sims.emplace_back(specs[k], tables[k]);
    obs_all[k] = observe_all(sims[k]);
  }

  const int steps = steps_override > 0 ? steps_override : specs[0].num_steps();
  const xscen::CrossNeighborMap* cross_ptr =
      model.cross_scenario ? &cross : nullptr;

  for (int t = 0; t < steps; ++t) {
    const std::vector<std::vector<Vec>> snapshot = obs_all;
    for (int k = 0; k < num_scenarios; ++k) {
      std::vector<int> actions(sims[k].size());
      for (int i = 0; i < sims[k].size(); ++i) {
        const auto neigh = gather_neighbor_obs(snapshot, tables[k], k, i, cross_ptr);
        actions[i] =
            greedy_action(model, k, i, snapshot[k][i], neigh,
                          valid_mask_of(tables[k].intersections[i]));
      }
      obs_all[k] = sims[k].step(actions).obs;
    }
  }

  std::vector<MetricsReport> reports;
  for (int k = 0; k < num_scenarios; ++k) {
    reports.push_back(compute_metrics(
        sims[k].vehicle_records(), steps * specs[k].decision_interval_s));
  }
  return reports;
}

xscen::CrossNeighborMap refresh_cross_map_for_eval(
    const std::vector<simnet::ScenarioSpec>& specs,
    const std::vector<simnet::ScenarioTables>& tables, const Model& model) {
  const int num_scenarios = static_cast<int>(specs.size());
  std::vector<std::vector<Vec>> obs_all(num_scenarios);
  for (int k = 0; k < num_scenarios; ++k) {
    simnet::Sim sim(specs[k], tables[k]);
    obs_all[k] = observe_all(sim);
  }
  // Warm-up pass: a greedy episode with the initial-observation map gives
  // the end-of-episode observations the refresh would see in training.
  xscen::CrossNeighborMap initial = xscen::build_cross_map(
      xscen::embed_observations(model.params, obs_all), xscen::kCrossNeighbors, 0);
  if (!model.cross_scenario) return initial;

  std::vector<simnet::Sim> sims;
  sims.reserve(num_scenarios);
  for (int k = 0; k < num_scenarios; ++k) sims.emplace_back(specs[k], tables[k]);
  const int steps = specs[0].num_steps();
  for (int t = 0; t < steps; ++t) {
    const std::vector<std::vector<Vec>> snapshot = obs_all;
    for (int k = 0; k < num_scenarios; ++k) {
      std::vector<int> actions(sims[k].size());
      for (int i = 0; i < sims[k].size(); ++i) {
        const auto neigh = gather_neighbor_obs(snapshot, tables[k], k, i, &initial);
        actions[i] =
            greedy_action(model, k, i, snapshot[k][i], neigh,
                          valid_mask_of(tables[k].intersections[i]));
      }
      obs_all[k] = sims[k].step(actions).obs;
    }
  }
  return xscen::build_cross_map(xscen::embed_observations(model.params, obs_all),
                                xscen::kCrossNeighbors, 0);
}

void dump_embeddings(const Model& model,
                     const std::vector<simnet::ScenarioSpec>& specs,
                     const std::vector<simnet::ScenarioTables>& tables,
                     int window_lo, int window_hi, const std::string& path) {
  std::vector<int> sizes;
  for (const auto& t : tables) sizes.push_back(t.size());
  require_compatible(model, sizes);
  if (window_lo < 0 || window_hi < window_lo) {
    throw ValidationError("bad embedding window");
  }

  const int num_scenarios = static_cast<int>(specs.size());
  xscen::CrossNeighborMap cross;
  if (model.cross_scenario) {
    cross = refresh_cross_map_for_eval(specs, tables, model);
  }
  const xscen::CrossNeighborMap* cross_ptr =
      model.cross_scenario ? &cross : nullptr;

  std::vector<simnet::Sim> sims;
  std::vector<std::vector<Vec>> obs_all(num_scenarios);
  for (int k = 0; k < num_scenarios; ++k) {
    sims.emplace_back(specs[k], tables[k]);
    obs_all[k] = observe_all(sims[k]);
  }

  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  std::string line = "scenario\tintersection\tstep";
  for (int d = 0; d < 2 * model.dims.feat_dim; ++d) {
    line += "\te" + std::to_string(d);
  }
  out << line << "\n";

  const int steps = specs[0].num_steps();
  for (int t = 0; t <= window_hi && t < steps; ++t) {
    const std::vector<std::vector<Vec>> snapshot = obs_all;
    for (int k = 0; k < num_scenarios; ++k) {
      std::vector<int> actions(sims[k].size());
      for (int i = 0; i < sims[k].size(); ++i) {
        const auto neigh = gather_neighbor_obs(snapshot, tables[k], k, i, cross_ptr);
        const auto cache = qkernel::forward(model.params, model.emb, k, i,
                                            snapshot[k][i], neigh);
        if (t >= window_lo) {
          line.clear();
          line += std::to_string(k);
          line += '\t';
          line += std::to_string(i);
          line += '\t';
          line += std::to_string(t);
          for (double v : cache.agg) {
            line += '\t';
            format_double(line, v);
          }
          for (double v : cache.self_feat) {
            line += '\t';
            format_double(line, v);
          }
          out << line << "\n";
        }
        Rng unused(0);
        actions[i] = agent::select_action(
            cache.q, valid_mask_of(tables[k].intersections[i]), 0.0, unused);
      }
      obs_all[k] = sims[k].step(actions).obs;
    }
  }
  if (!out) throw Error("failed writing '" + path + "'");
}

}  // namespace dualight::evalkit
