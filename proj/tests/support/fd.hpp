#pragma once

// Central finite-difference machinery for checking the hand-derived
// backward pass, plus seeded instance generators that stay away from
// relu kinks (the subgradient at 0 is defined as 0, so instances whose
// pre-activations sit within the perturbation radius of 0 are skipped).

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "dualight/qnet.hpp"
#include "dualight/rng.hpp"

namespace testsup {

using dualight::Rng;
using dualight::Vec;
namespace qk = dualight::qkernel;

struct GradEntry {
  double* param;
  double analytic;
  std::string name;
};

/// Pairs every shared-parameter entry (and the touched experiential rows)
/// with its analytic gradient.
inline std::vector<GradEntry> collect_entries(qk::SharedParams& params,
                                              qk::ExperientialWeights& emb,
                                              const qk::GradientSet& grads) {
  std::vector<GradEntry> out;
  auto add_mat = [&](dualight::Mat& m, const dualight::Mat& g, const std::string& n) {
    for (size_t i = 0; i < m.a.size(); ++i) {
      out.push_back({&m.a[i], g.a[i], n + "[" + std::to_string(i) + "]"});
    }
  };
  auto add_vec = [&](Vec& v, const Vec& g, const std::string& n) {
    for (size_t i = 0; i < v.size(); ++i) {
      out.push_back({&v[i], g[i], n + "[" + std::to_string(i) + "]"});
    }
  };
  add_mat(params.w_feat, grads.d_w_feat, "w_feat");
  add_vec(params.b_feat, grads.d_b_feat, "b_feat");
  add_mat(params.w_att, grads.d_w_att, "w_att");
  for (size_t m = 0; m < params.w_head.size(); ++m) {
    add_mat(params.w_head[m], grads.d_w_head[m], "w_head" + std::to_string(m));
  }
  add_mat(params.w_out, grads.d_w_out, "w_out");
  add_vec(params.b_out, grads.d_b_out, "b_out");

  for (const auto& [k, rows] : grads.d_int_rows) {
    for (const auto& [r, g] : rows) {
      dualight::Mat& table = emb.intersection_w[k];
      for (int c = 0; c < table.cols; ++c) {
        out.push_back({&table(r, c), g[c],
                       "int_w[" + std::to_string(k) + "][" + std::to_string(r) +
                           "][" + std::to_string(c) + "]"});
      }
    }
  }
  for (const auto& [k, rows] : grads.d_fea_rows) {
    for (const auto& [r, g] : rows) {
      dualight::Mat& table = emb.feature_w[k];
      for (int c = 0; c < table.cols; ++c) {
        out.push_back({&table(r, c), g[c],
                       "fea_w[" + std::to_string(k) + "][" + std::to_string(r) +
                           "][" + std::to_string(c) + "]"});
      }
    }
  }
  return out;
}

struct FdFailure {
  std::string name;
  double analytic;
  double numeric;
  double rel_err;
};

/// Central differences with step h on every collected entry; returns the
/// worst offender above the tolerance, if any.
inline std::vector<FdFailure> check_gradients(
    std::vector<GradEntry>& entries, const std::function<double()>& eval,
    double h = 1e-5, double tol = 1e-4) {
  std::vector<FdFailure> failures;
  for (auto& e : entries) {
    const double saved = *e.param;
    *e.param = saved + h;
    const double up = eval();
    *e.param = saved - h;
    const double down = eval();
    *e.param = saved;
    const double numeric = (up - down) / (2.0 * h);
    const double rel =
        std::fabs(e.analytic - numeric) /
        std::max({1e-6, std::fabs(e.analytic), std::fabs(numeric)});
    if (rel > tol) failures.push_back({e.name, e.analytic, numeric, rel});
  }
  return failures;
}

/// A seeded parameter/observation instance. Observations look like the
/// simulator's: a one-hot phase block plus non-negative counts.
struct Instance {
  qk::SharedParams params;
  qk::ExperientialWeights emb;
  std::vector<Vec> obs;  // n_nodes
  Vec dq;
};

inline Vec random_observation(const qk::DimConfig& dims, Rng& rng) {
  Vec obs(dims.obs_dim, 0.0);
  obs[rng.uniform_int(8)] = 1.0;
  for (int f = 8; f < dims.obs_dim; ++f) {
    obs[f] = static_cast<double>(rng.uniform_int(7));
  }
  return obs;
}

inline Instance make_instance(const qk::DimConfig& dims, uint64_t seed,
                              int num_scenarios = 2, int rows = 3) {
  Instance inst;
  inst.params = qk::init_shared(seed, dims);
  inst.emb = qk::init_experiential(dims, std::vector<int>(num_scenarios, rows));
  Rng rng(seed ^ 0x5bd1e995u);
  for (auto& table : inst.emb.intersection_w) {
    for (double& v : table.a) v = rng.uniform_range(0.5, 1.5);
  }
  for (auto& table : inst.emb.feature_w) {
    for (double& v : table.a) v = rng.uniform_range(0.5, 1.5);
  }
  for (int j = 0; j < dims.num_nodes(); ++j) {
    inst.obs.push_back(random_observation(dims, rng));
  }
  inst.dq.resize(dims.num_phases);
  for (double& v : inst.dq) v = rng.uniform_range(-1.0, 1.0);
  return inst;
}

/// True when every relu pre-activation sits safely away from 0, so the
/// finite-difference perturbation cannot cross a kink.
inline bool kink_safe(const qk::ForwardCache& cache, double margin = 5e-3) {
  for (const Vec& pre : cache.psi_pre) {
    for (double v : pre) {
      if (std::fabs(v) < margin) return false;
    }
  }
  for (double v : cache.agg_pre) {
    if (std::fabs(v) < margin) return false;
  }
  return true;
}

}  // namespace testsup
