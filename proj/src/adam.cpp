#include "dualight/adam.hpp"

#include <cmath>

#include "dualight/errors.hpp"

namespace dualight::qkernel {

namespace {

void step_span(double* w, const double* g, size_t n, Moments& mo,
               const AdamConfig& cfg) {
  if (mo.m.size() != n) throw DimensionMismatch("adam moment size mismatch");
  mo.t += 1;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(mo.t));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(mo.t));
  for (size_t i = 0; i < n; ++i) {
    mo.m[i] = cfg.beta1 * mo.m[i] + (1.0 - cfg.beta1) * g[i];
    mo.v[i] = cfg.beta2 * mo.v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
    const double m_hat = mo.m[i] / bc1;
    const double v_hat = mo.v[i] / bc2;
    w[i] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
  }
}

Moments make_moments(size_t n) { return {Vec(n, 0.0), Vec(n, 0.0), 0}; }

bool all_zero(const Vec& v) {
  for (double x : v) {
    if (x != 0.0) return false;
  }
  return true;
}

}  // namespace

AdamState AdamState::init(const DimConfig& dims,
                          const std::vector<int>& scenario_sizes) {
  AdamState st;
  st.w_feat = make_moments(static_cast<size_t>(dims.obs_dim) * dims.feat_dim);
  st.b_feat = make_moments(dims.feat_dim);
  st.w_att = make_moments(static_cast<size_t>(dims.feat_dim) * dims.att_dim);
  st.w_head.assign(dims.num_heads,
                   make_moments(static_cast<size_t>(dims.att_dim) * dims.feat_dim));
  st.w_out = make_moments(static_cast<size_t>(2 * dims.feat_dim) * dims.num_phases);
  st.b_out = make_moments(dims.num_phases);
  for (int n : scenario_sizes) {
    st.int_rows.emplace_back(n, make_moments(dims.num_nodes()));
    st.fea_rows.emplace_back(n, make_moments(dims.feat_dim));
  }
  return st;
}

void adam_step_shared(SharedParams& params, const GradientSet& grads,
                      const AdamConfig& cfg, AdamState& state) {
  step_span(params.w_feat.a.data(), grads.d_w_feat.a.data(), params.w_feat.a.size(),
            state.w_feat, cfg);
  step_span(params.b_feat.data(), grads.d_b_feat.data(), params.b_feat.size(),
            state.b_feat, cfg);
  step_span(params.w_att.a.data(), grads.d_w_att.a.data(), params.w_att.a.size(),
            state.w_att, cfg);
  for (size_t m = 0; m < params.w_head.size(); ++m) {
    step_span(params.w_head[m].a.data(), grads.d_w_head[m].a.data(),
              params.w_head[m].a.size(), state.w_head[m], cfg);
  }
  step_span(params.w_out.a.data(), grads.d_w_out.a.data(), params.w_out.a.size(),
            state.w_out, cfg);
  step_span(params.b_out.data(), grads.d_b_out.data(), params.b_out.size(),
            state.b_out, cfg);
  params.version += 1;
}

void adam_step_embeddings(ExperientialWeights& emb, const GradientSet& grads,
                          const AdamConfig& cfg, AdamState& state,
                          bool update_intersection, bool update_feature) {
  // A row whose gradient is exactly zero is left untouched, moment
  // estimates included.
  if (update_intersection) {
    for (const auto& [k, rows] : grads.d_int_rows) {
      Mat& table = emb.intersection_w.at(k);
      for (const auto& [r, g] : rows) {
        if (all_zero(g)) continue;
        step_span(table.row(r), g.data(), g.size(), state.int_rows.at(k).at(r), cfg);
      }
    }
  }
  if (update_feature) {
    for (const auto& [k, rows] : grads.d_fea_rows) {
      Mat& table = emb.feature_w.at(k);
      for (const auto& [r, g] : rows) {
        if (all_zero(g)) continue;
        step_span(table.row(r), g.data(), g.size(), state.fea_rows.at(k).at(r), cfg);
      }
    }
  }
}

void adam_step(SharedParams& params, ExperientialWeights& emb,
               const GradientSet& grads, const AdamConfig& cfg, AdamState& state) {
  adam_step_shared(params, grads, cfg, state);
  adam_step_embeddings(emb, grads, cfg, state);
}

}  // namespace dualight::qkernel
