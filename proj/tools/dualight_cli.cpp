#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "dualight/checkpoint.hpp"
#include "dualight/errors.hpp"
#include "dualight/runner.hpp"
#include "dualight/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliOptions {
  std::vector<std::string> scenario_paths;
  uint64_t seed = 0;
  dualight::trainer::TrainConfig train;
  std::string out_dir = "run";
  std::string checkpoint;
  std::string policy = "dualight";
  int eval_seeds = 5;
  int window_lo = 100;
  int window_hi = 110;
  std::string from_config;
};

json resolved_config(const CliOptions& opt) {
  json j;
  j["scenarios"] = opt.scenario_paths;
  j["seed"] = opt.seed;
  j["episodes"] = opt.train.episodes;
  j["steps"] = opt.train.steps_per_episode;
  j["batch"] = opt.train.batch_size;
  j["gamma"] = opt.train.gamma;
  j["lr"] = opt.train.lr;
  j["target_sync"] = opt.train.target_sync_episodes;
  j["replay_capacity"] = opt.train.replay_capacity;
  j["m1_period"] = opt.train.m1_period_steps;
  j["m2_period"] = opt.train.m2_period_steps;
  j["m2_per_episode"] = opt.train.m2_updates_per_episode;
  j["eval_interval"] = opt.train.eval_interval;
  j["epsilon_start"] = opt.train.policy.epsilon_start;
  j["epsilon_min"] = opt.train.policy.epsilon_min;
  j["epsilon_decay"] = opt.train.policy.epsilon_decay;
  j["no_cotrain"] = opt.train.disable_cotrain;
  j["no_experiential"] = opt.train.disable_experiential;
  j["no_intersection_wise"] = opt.train.disable_intersection_wise;
  j["no_feature_wise"] = opt.train.disable_feature_wise;
  j["xscen"] = opt.train.cross_scenario;
  j["parallel"] = opt.train.parallel;
  return j;
}

void apply_config(const json& j, CliOptions& opt) {
  opt.scenario_paths = j.at("scenarios").get<std::vector<std::string>>();
  opt.seed = j.at("seed").get<uint64_t>();
  opt.train.episodes = j.at("episodes").get<int>();
  opt.train.steps_per_episode = j.at("steps").get<int>();
  opt.train.batch_size = j.at("batch").get<int>();
  opt.train.gamma = j.at("gamma").get<double>();
  opt.train.lr = j.at("lr").get<double>();
  opt.train.target_sync_episodes = j.at("target_sync").get<int>();
  opt.train.replay_capacity = j.at("replay_capacity").get<int>();
  opt.train.m1_period_steps = j.at("m1_period").get<int>();
  opt.train.m2_period_steps = j.at("m2_period").get<int>();
  opt.train.m2_updates_per_episode = j.at("m2_per_episode").get<int>();
  opt.train.eval_interval = j.at("eval_interval").get<int>();
  opt.train.policy.epsilon_start = j.at("epsilon_start").get<double>();
  opt.train.policy.epsilon_min = j.at("epsilon_min").get<double>();
  opt.train.policy.epsilon_decay = j.at("epsilon_decay").get<double>();
  opt.train.disable_cotrain = j.at("no_cotrain").get<bool>();
  opt.train.disable_experiential = j.at("no_experiential").get<bool>();
  opt.train.disable_intersection_wise = j.at("no_intersection_wise").get<bool>();
  opt.train.disable_feature_wise = j.at("no_feature_wise").get<bool>();
  opt.train.cross_scenario = j.at("xscen").get<bool>();
  opt.train.parallel = j.at("parallel").get<bool>();
}

std::vector<dualight::simnet::ScenarioSpec> load_all(
    const std::vector<std::string>& paths) {
  if (paths.empty()) throw dualight::ValidationError("no scenario files given");
  std::vector<dualight::simnet::ScenarioSpec> specs;
  for (const auto& p : paths) specs.push_back(dualight::simnet::load_scenario(p));
  return specs;
}

std::vector<dualight::simnet::ScenarioTables> tables_of(
    const std::vector<dualight::simnet::ScenarioSpec>& specs) {
  std::vector<dualight::simnet::ScenarioTables> tables;
  for (const auto& s : specs) tables.push_back(dualight::simnet::build_tables(s));
  return tables;
}

int cmd_train(CliOptions& opt) {
  if (!opt.from_config.empty()) {
    std::ifstream in(opt.from_config);
    if (!in) throw dualight::Error("cannot open config '" + opt.from_config + "'");
    apply_config(json::parse(in), opt);
  }
  auto specs = load_all(opt.scenario_paths);

  fs::create_directories(opt.out_dir);
  {
    std::ofstream cfg(fs::path(opt.out_dir) / "config");
    cfg << resolved_config(opt).dump(2) << "\n";
  }

  const auto start = std::chrono::steady_clock::now();
  auto result = dualight::trainer::train(specs, opt.train, opt.seed);
  const auto wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start);

  dualight::trainer::write_metrics_log(result.records,
                                       (fs::path(opt.out_dir) / "metrics.log").string());
  dualight::save_checkpoint(result.model,
                            (fs::path(opt.out_dir) / "checkpoint.bin").string());

  if (!result.records.empty()) {
    const auto& last = result.records.back();
    std::fprintf(stderr,
                 "trained %d episodes over %zu scenario(s) in %.1fs; final "
                 "avg wait %.2fs\n",
                 opt.train.episodes, specs.size(), wall.count(), last.avg_wait);
  }
  std::cout << opt.out_dir << "\n";
  return 0;
}

int cmd_eval(CliOptions& opt) {
  auto specs = load_all(opt.scenario_paths);
  auto tables = tables_of(specs);
  const auto kind = dualight::evalkit::parse_policy(opt.policy);

  dualight::Model model;
  if (kind == dualight::evalkit::PolicyKind::kDuaLight) {
    if (opt.checkpoint.empty()) {
      throw dualight::ValidationError("--policy dualight requires --checkpoint");
    }
    model = dualight::load_checkpoint(opt.checkpoint);
    std::vector<int> sizes;
    for (const auto& t : tables) sizes.push_back(t.size());
    dualight::require_compatible(model, sizes);
  }

  // mean and std per scenario over the requested seeds
  for (size_t k = 0; k < specs.size(); ++k) {
    std::vector<dualight::evalkit::MetricsReport> reports;
    for (int s = 0; s < opt.eval_seeds; ++s) {
      if (kind == dualight::evalkit::PolicyKind::kDuaLight && model.cross_scenario) {
        auto cross =
            dualight::evalkit::refresh_cross_map_for_eval(specs, tables, model);
        reports.push_back(dualight::evalkit::run_episode_lockstep(
            specs, tables, model, cross)[k]);
      } else {
        reports.push_back(dualight::evalkit::run_episode(
            specs[k], tables[k], kind,
            kind == dualight::evalkit::PolicyKind::kDuaLight ? &model : nullptr,
            static_cast<int>(k), opt.seed + static_cast<uint64_t>(s)));
      }
    }
    const auto summary = dualight::evalkit::summarize(reports);
    std::printf("scenario %zu (%s, %d seeds)\n", k, opt.policy.c_str(),
                summary.runs);
    std::printf("  avg_delay 	%.2f +- %.2f s\n", summary.mean_delay,
                summary.std_delay);
    std::printf("  avg_trip  	%.2f +- %.2f s\n", summary.mean_trip,
                summary.std_trip);
    std::printf("  avg_wait  	%.2f +- %.2f s\n", summary.mean_wait,
                summary.std_wait);
  }
  return 0;
}

int cmd_dump(CliOptions& opt) {
  auto specs = load_all(opt.scenario_paths);
  auto tables = tables_of(specs);
  if (opt.checkpoint.empty()) {
    throw dualight::ValidationError("dump requires --checkpoint");
  }
  auto model = dualight::load_checkpoint(opt.checkpoint);
  fs::create_directories(opt.out_dir);
  const auto path = (fs::path(opt.out_dir) / "embeddings.tsv").string();
  dualight::evalkit::dump_embeddings(model, specs, tables, opt.window_lo,
                                     opt.window_hi, path);
  std::cout << path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DuaLight traffic-signal control laboratory"};
  app.require_subcommand(1);

  CliOptions opt;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("-s,--scenario", opt.scenario_paths,
                    "scenario file (repeat for co-training)");
    cmd->add_option("--seed", opt.seed, "random seed");
    cmd->add_option("--out", opt.out_dir, "output directory");
  };

  CLI::App* train = app.add_subcommand("train", "train a model");
  add_common(train);
  train->add_option("--episodes", opt.train.episodes, "training episodes (L)");
  train->add_option("--steps", opt.train.steps_per_episode,
                    "decision steps per episode (0 = from scenario)");
  train->add_option("--batch", opt.train.batch_size, "minibatch size (B)");
  train->add_option("--gamma", opt.train.gamma, "discount factor");
  train->add_option("--lr", opt.train.lr, "learning rate");
  train->add_option("--target-sync", opt.train.target_sync_episodes,
                    "target network sync period (episodes)");
  train->add_option("--replay-capacity", opt.train.replay_capacity,
                    "replay ring capacity per scenario");
  train->add_option("--m1-period", opt.train.m1_period_steps,
                    "experiential update period in decision steps (0 = off)");
  train->add_option("--m2-period", opt.train.m2_period_steps,
                    "shared update period in decision steps (0 = off)");
  train->add_option("--m2-per-episode", opt.train.m2_updates_per_episode,
                    "shared updates at each episode end");
  train->add_option("--eval-interval", opt.train.eval_interval,
                    "evaluation period (episodes)");
  train->add_flag("--no-cotrain", opt.train.disable_cotrain,
                  "single-scenario shared updates");
  train->add_flag("--no-experiential", opt.train.disable_experiential,
                  "freeze both experiential tables at all-ones");
  train->add_flag("--no-intersection-wise", opt.train.disable_intersection_wise,
                  "freeze the intersection-wise table");
  train->add_flag("--no-feature-wise", opt.train.disable_feature_wise,
                  "freeze the feature-wise table");
  train->add_flag("--xscen", opt.train.cross_scenario,
                  "aggregate top-5 similar intersections from other scenarios");
  train->add_flag("--parallel", opt.train.parallel,
                  "roll scenarios on worker threads");
  train->add_option("--from-config", opt.from_config,
                    "replay a resolved config record (overrides other flags)");

  CLI::App* eval = app.add_subcommand("eval", "evaluate a policy");
  add_common(eval);
  eval->add_option("--policy", opt.policy, "dualight|ftc|maxpressure|random");
  eval->add_option("--checkpoint", opt.checkpoint, "trained checkpoint");
  eval->add_option("--seeds", opt.eval_seeds, "number of evaluation seeds");

  CLI::App* dump = app.add_subcommand("dump", "dump aggregated embeddings");
  add_common(dump);
  dump->add_option("--checkpoint", opt.checkpoint, "trained checkpoint");
  dump->add_option("--window-lo", opt.window_lo, "first decision step dumped");
  dump->add_option("--window-hi", opt.window_hi, "last decision step dumped");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) return cmd_train(opt);
    if (eval->parsed()) return cmd_eval(opt);
    if (dump->parsed()) return cmd_dump(opt);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
