#pragma once

// Straight-line re-computation of the Q pipeline with plain scalar
// loops. Deliberately shares no code with the library forward pass: it
// reads the raw parameter storage and evaluates each layer formula
// directly, serving as the independent reference the implementation is
// checked against.

#include <cmath>
#include <vector>

#include "dualight/qnet.hpp"

namespace testsup {

inline std::vector<double> oracle_q(const dualight::qkernel::SharedParams& p,
                                    const dualight::qkernel::ExperientialWeights& emb,
                                    int scenario, int intersection,
                                    const std::vector<std::vector<double>>& obs) {
  const int f_dim = p.dims.obs_dim;
  const int d_dim = p.dims.feat_dim;
  const int a_dim = p.dims.att_dim;
  const int p_dim = p.dims.num_phases;
  const int heads = p.dims.num_heads;
  const int nodes = p.dims.num_nodes();

  std::vector<double> int_row(nodes), fea_row(d_dim);
  for (int j = 0; j < nodes; ++j) {
    int_row[j] = emb.intersection_w[scenario](intersection, j);
  }
  for (int d = 0; d < d_dim; ++d) {
    fea_row[d] = emb.feature_w[scenario](intersection, d);
  }

  // feature extractor: psi_j = relu(o_j W_f + b_f)
  std::vector<std::vector<double>> psi(nodes, std::vector<double>(d_dim));
  for (int j = 0; j < nodes; ++j) {
    for (int d = 0; d < d_dim; ++d) {
      double s = p.b_feat[d];
      for (int f = 0; f < f_dim; ++f) s += obs[j][f] * p.w_feat(f, d);
      psi[j][d] = s > 0.0 ? s : 0.0;
    }
  }

  // intersection-wise weighting and attention projection
  std::vector<std::vector<double>> proj(nodes, std::vector<double>(a_dim));
  for (int j = 0; j < nodes; ++j) {
    for (int c = 0; c < a_dim; ++c) {
      double s = 0.0;
      for (int d = 0; d < d_dim; ++d) s += int_row[j] * psi[j][d] * p.w_att(d, c);
      proj[j][c] = s;
    }
  }

  // scaled dot-product attention, query = self
  std::vector<double> logits(nodes);
  for (int j = 0; j < nodes; ++j) {
    double s = 0.0;
    for (int c = 0; c < a_dim; ++c) s += proj[0][c] * proj[j][c];
    logits[j] = s / std::sqrt(static_cast<double>(a_dim));
  }
  double denom = 0.0;
  std::vector<double> att(nodes);
  for (int j = 0; j < nodes; ++j) denom += std::exp(logits[j]);
  for (int j = 0; j < nodes; ++j) att[j] = std::exp(logits[j]) / denom;

  // head-averaged values, attention pooling, relu
  std::vector<double> agg(d_dim);
  for (int d = 0; d < d_dim; ++d) {
    double s = 0.0;
    for (int j = 0; j < nodes; ++j) {
      double y = 0.0;
      for (int m = 0; m < heads; ++m) {
        for (int c = 0; c < a_dim; ++c) y += proj[j][c] * p.w_head[m](c, d);
      }
      s += att[j] * y / static_cast<double>(heads);
    }
    agg[d] = s > 0.0 ? s : 0.0;
  }

  // feature-wise weighting and the output head
  std::vector<double> q(p_dim);
  for (int c = 0; c < p_dim; ++c) {
    double s = p.b_out[c];
    for (int d = 0; d < d_dim; ++d) s += agg[d] * p.w_out(d, c);
    for (int d = 0; d < d_dim; ++d) {
      s += fea_row[d] * psi[0][d] * p.w_out(d_dim + d, c);
    }
    q[c] = s;
  }
  return q;
}

/// The same pipeline with the experiential weighting removed entirely
/// (no intersection-wise scalars, no feature-wise product), for the
/// identity-initialization property.
inline std::vector<double> oracle_q_unweighted(
    const dualight::qkernel::SharedParams& p,
    const std::vector<std::vector<double>>& obs) {
  const int f_dim = p.dims.obs_dim;
  const int d_dim = p.dims.feat_dim;
  const int a_dim = p.dims.att_dim;
  const int p_dim = p.dims.num_phases;
  const int heads = p.dims.num_heads;
  const int nodes = p.dims.num_nodes();

  std::vector<std::vector<double>> psi(nodes, std::vector<double>(d_dim));
  for (int j = 0; j < nodes; ++j) {
    for (int d = 0; d < d_dim; ++d) {
      double s = p.b_feat[d];
      for (int f = 0; f < f_dim; ++f) s += obs[j][f] * p.w_feat(f, d);
      psi[j][d] = s > 0.0 ? s : 0.0;
    }
  }

  std::vector<std::vector<double>> proj(nodes, std::vector<double>(a_dim));
  for (int j = 0; j < nodes; ++j) {
    for (int c = 0; c < a_dim; ++c) {
      double s = 0.0;
      for (int d = 0; d < d_dim; ++d) s += psi[j][d] * p.w_att(d, c);
      proj[j][c] = s;
    }
  }

  std::vector<double> logits(nodes);
  for (int j = 0; j < nodes; ++j) {
    double s = 0.0;
    for (int c = 0; c < a_dim; ++c) s += proj[0][c] * proj[j][c];
    logits[j] = s / std::sqrt(static_cast<double>(a_dim));
  }
  double denom = 0.0;
  std::vector<double> att(nodes);
  for (int j = 0; j < nodes; ++j) denom += std::exp(logits[j]);
  for (int j = 0; j < nodes; ++j) att[j] = std::exp(logits[j]) / denom;

  std::vector<double> agg(d_dim);
  for (int d = 0; d < d_dim; ++d) {
    double s = 0.0;
    for (int j = 0; j < nodes; ++j) {
      double y = 0.0;
      for (int m = 0; m < heads; ++m) {
        for (int c = 0; c < a_dim; ++c) y += proj[j][c] * p.w_head[m](c, d);
      }
      s += att[j] * y / static_cast<double>(heads);
    }
    agg[d] = s > 0.0 ? s : 0.0;
  }

  std::vector<double> q(p_dim);
  for (int c = 0; c < p_dim; ++c) {
    double s = p.b_out[c];
    for (int d = 0; d < d_dim; ++d) s += agg[d] * p.w_out(d, c);
    for (int d = 0; d < d_dim; ++d) s += psi[0][d] * p.w_out(d_dim + d, c);
    q[c] = s;
  }
  return q;
}

}  // namespace testsup
