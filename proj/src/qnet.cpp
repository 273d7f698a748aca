#include "dualight/qnet.hpp"

#include <algorithm>
#include <cmath>

#include "dualight/errors.hpp"

namespace dualight::qkernel {

namespace {

void fill_uniform(Mat& m, double bound, Rng& rng) {
  for (double& v : m.a) v = rng.uniform_range(-bound, bound);
}

void fill_uniform(Vec& v, double bound, Rng& rng) {
  for (double& x : v) x = rng.uniform_range(-bound, bound);
}

}  // namespace

bool SharedParams::same_values(const SharedParams& other) const {
  if (!(dims == other.dims)) return false;
  auto eq = [](const Mat& a, const Mat& b) { return a.a == b.a; };
  if (!eq(w_feat, other.w_feat) || b_feat != other.b_feat) return false;
  if (!eq(w_att, other.w_att)) return false;
  for (size_t m = 0; m < w_head.size(); ++m) {
    if (!eq(w_head[m], other.w_head[m])) return false;
  }
  return eq(w_out, other.w_out) && b_out == other.b_out;
}

GradientSet GradientSet::zeros(const DimConfig& dims) {
  GradientSet g;
  g.d_w_feat = Mat(dims.obs_dim, dims.feat_dim);
  g.d_b_feat = Vec(dims.feat_dim, 0.0);
  g.d_w_att = Mat(dims.feat_dim, dims.att_dim);
  g.d_w_head.assign(dims.num_heads, Mat(dims.att_dim, dims.feat_dim));
  g.d_w_out = Mat(2 * dims.feat_dim, dims.num_phases);
  g.d_b_out = Vec(dims.num_phases, 0.0);
  return g;
}

void GradientSet::scale(double s) {
  auto sc = [s](Vec& v) {
    for (double& x : v) x *= s;
  };
  sc(d_w_feat.a);
  sc(d_b_feat);
  sc(d_w_att.a);
  for (Mat& m : d_w_head) sc(m.a);
  sc(d_w_out.a);
  sc(d_b_out);
  for (auto& [k, rows] : d_int_rows) {
    for (auto& [r, v] : rows) sc(v);
  }
  for (auto& [k, rows] : d_fea_rows) {
    for (auto& [r, v] : rows) sc(v);
  }
}

SharedParams init_shared(uint64_t seed, const DimConfig& dims) {
  if (dims.obs_dim <= 0 || dims.feat_dim <= 0 || dims.att_dim <= 0 ||
      dims.num_phases <= 0 || dims.num_heads <= 0 || dims.num_neighbors <= 0) {
    throw DimensionMismatch("all dimensions must be positive");
  }
  SharedParams p;
  p.dims = dims;
  Rng rng(seed);

  p.w_feat = Mat(dims.obs_dim, dims.feat_dim);
  p.b_feat = Vec(dims.feat_dim, 0.0);
  const double feat_bound = 1.0 / std::sqrt(static_cast<double>(dims.obs_dim));
  fill_uniform(p.w_feat, feat_bound, rng);
  fill_uniform(p.b_feat, feat_bound, rng);

  p.w_att = Mat(dims.feat_dim, dims.att_dim);
  fill_uniform(p.w_att, 1.0 / std::sqrt(static_cast<double>(dims.feat_dim)), rng);

  p.w_head.assign(dims.num_heads, Mat(dims.att_dim, dims.feat_dim));
  const double head_bound = 1.0 / std::sqrt(static_cast<double>(dims.att_dim));
  for (Mat& h : p.w_head) fill_uniform(h, head_bound, rng);

  p.w_out = Mat(2 * dims.feat_dim, dims.num_phases);
  p.b_out = Vec(dims.num_phases, 0.0);
  const double out_bound = 1.0 / std::sqrt(static_cast<double>(2 * dims.feat_dim));
  fill_uniform(p.w_out, out_bound, rng);
  fill_uniform(p.b_out, out_bound, rng);

  return p;
}

ExperientialWeights init_experiential(const DimConfig& dims,
                                      const std::vector<int>& scenario_sizes) {
  ExperientialWeights emb;
  for (int n : scenario_sizes) {
    emb.intersection_w.emplace_back(n, dims.num_nodes(), 1.0);
    emb.feature_w.emplace_back(n, dims.feat_dim, 1.0);
  }
  return emb;
}

Vec feature_embedding(const SharedParams& params, const Vec& obs) {
  if (static_cast<int>(obs.size()) != params.dims.obs_dim) {
    throw DimensionMismatch("observation length != obs_dim");
  }
  Vec pre = mul(obs, params.w_feat);
  axpy(pre, params.b_feat);
  return relu(pre);
}

ForwardCache forward(const SharedParams& params, const ExperientialWeights& emb,
                     int scenario, int intersection, const Vec& obs_self,
                     std::span<const Vec> obs_neighbors) {
  const DimConfig& dims = params.dims;
  if (static_cast<int>(obs_neighbors.size()) != dims.num_neighbors) {
    throw DimensionMismatch("expected " + std::to_string(dims.num_neighbors) +
                            " neighbor observations, got " +
                            std::to_string(obs_neighbors.size()));
  }
  if (scenario < 0 || scenario >= emb.num_scenarios()) {
    throw DimensionMismatch("scenario index out of range");
  }
  const Mat& int_table = emb.intersection_w[scenario];
  const Mat& fea_table = emb.feature_w[scenario];
  if (intersection < 0 || intersection >= int_table.rows) {
    throw DimensionMismatch("intersection index out of range");
  }
  if (int_table.cols != dims.num_nodes() || fea_table.cols != dims.feat_dim) {
    throw DimensionMismatch("experiential table width does not match dims");
  }

  ForwardCache c;
  c.params = &params;
  c.version = params.version;
  c.scenario = scenario;
  c.intersection = intersection;
  c.n_nodes = dims.num_nodes();
  c.int_row = int_table.row_vec(intersection);
  c.fea_row = fea_table.row_vec(intersection);

  c.obs.reserve(c.n_nodes);
  c.obs.push_back(obs_self);
  for (const Vec& o : obs_neighbors) c.obs.push_back(o);

  // feature extraction and intersection-wise weighting per node
  for (int j = 0; j < c.n_nodes; ++j) {
    if (static_cast<int>(c.obs[j].size()) != dims.obs_dim) {
      throw DimensionMismatch("observation length != obs_dim");
    }
    Vec pre = mul(c.obs[j], params.w_feat);
    axpy(pre, params.b_feat);
    c.psi_pre.push_back(pre);
    c.psi.push_back(relu(pre));
    c.weighted.push_back(scaled(c.psi.back(), c.int_row[j]));
    c.att_proj.push_back(mul(c.weighted.back(), params.w_att));
  }

  // scaled dot-product attention over {self} + neighbors, query = self
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(dims.att_dim));
  c.att_logits.resize(c.n_nodes);
  for (int j = 0; j < c.n_nodes; ++j) {
    c.att_logits[j] = dot(c.att_proj[0], c.att_proj[j]) * inv_sqrt;
  }
  const double max_logit = *std::max_element(c.att_logits.begin(), c.att_logits.end());
  c.att.resize(c.n_nodes);
  double denom = 0.0;
  for (int j = 0; j < c.n_nodes; ++j) {
    c.att[j] = std::exp(c.att_logits[j] - max_logit);
    denom += c.att[j];
  }
  for (double& a : c.att) a /= denom;

  // head-averaged value path and attention pooling
  const double inv_heads = 1.0 / static_cast<double>(dims.num_heads);
  c.value.reserve(c.n_nodes);
  c.agg_pre.assign(dims.feat_dim, 0.0);
  for (int j = 0; j < c.n_nodes; ++j) {
    Vec value(dims.feat_dim, 0.0);
    for (int m = 0; m < dims.num_heads; ++m) {
      axpy(value, mul(c.att_proj[j], params.w_head[m]), inv_heads);
    }
    axpy(c.agg_pre, value, c.att[j]);
    c.value.push_back(std::move(value));
  }
  c.agg = relu(c.agg_pre);

  // feature-wise weighting of the self features
  c.self_feat = hadamard(c.fea_row, c.psi[0]);

  // Q head over the concatenation
  Vec concat(2 * dims.feat_dim);
  std::copy(c.agg.begin(), c.agg.end(), concat.begin());
  std::copy(c.self_feat.begin(), c.self_feat.end(), concat.begin() + dims.feat_dim);
  c.q = mul(concat, params.w_out);
  axpy(c.q, params.b_out);

  return c;
}

void backward_into(const ForwardCache& c, const Vec& dq, GradientSet& g) {
  const SharedParams& p = *c.params;
  if (c.version != p.version) {
    throw StaleCache("parameters changed since the cache was produced");
  }
  const DimConfig& dims = p.dims;
  if (static_cast<int>(dq.size()) != dims.num_phases) {
    throw DimensionMismatch("dq length != num_phases");
  }

  // Q head
  Vec concat(2 * dims.feat_dim);
  std::copy(c.agg.begin(), c.agg.end(), concat.begin());
  std::copy(c.self_feat.begin(), c.self_feat.end(), concat.begin() + dims.feat_dim);
  add_outer(g.d_w_out, concat, dq);
  axpy(g.d_b_out, dq);
  const Vec d_concat = mul_t(p.w_out, dq);
  Vec d_agg(d_concat.begin(), d_concat.begin() + dims.feat_dim);
  Vec d_self_feat(d_concat.begin() + dims.feat_dim, d_concat.end());

  // feature-wise weighting
  Vec& d_fea_row = g.d_fea_rows[c.scenario]
                       .try_emplace(c.intersection, Vec(dims.feat_dim, 0.0))
                       .first->second;
  std::vector<Vec> d_psi(c.n_nodes, Vec(dims.feat_dim, 0.0));
  for (int d = 0; d < dims.feat_dim; ++d) {
    d_fea_row[d] += d_self_feat[d] * c.psi[0][d];
    d_psi[0][d] += d_self_feat[d] * c.fea_row[d];
  }

  // attention pooling (through the relu)
  const Vec d_agg_pre = relu_grad_mask(c.agg_pre, d_agg);
  Vec d_att(c.n_nodes, 0.0);
  std::vector<Vec> d_proj(c.n_nodes, Vec(dims.att_dim, 0.0));
  const double inv_heads = 1.0 / static_cast<double>(dims.num_heads);
  for (int j = 0; j < c.n_nodes; ++j) {
    d_att[j] = dot(d_agg_pre, c.value[j]);
    const Vec d_value = scaled(d_agg_pre, c.att[j]);
    for (int m = 0; m < dims.num_heads; ++m) {
      add_outer(g.d_w_head[m], c.att_proj[j], d_value, inv_heads);
      axpy(d_proj[j], mul_t(p.w_head[m], d_value), inv_heads);
    }
  }

  // softmax
  double dot_att = 0.0;
  for (int j = 0; j < c.n_nodes; ++j) dot_att += c.att[j] * d_att[j];
  Vec d_logits(c.n_nodes);
  for (int j = 0; j < c.n_nodes; ++j) {
    d_logits[j] = c.att[j] * (d_att[j] - dot_att);
  }

  // logits: l_j = proj_0 . proj_j / sqrt(D')
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(dims.att_dim));
  for (int j = 0; j < c.n_nodes; ++j) {
    const double s = d_logits[j] * inv_sqrt;
    axpy(d_proj[j], c.att_proj[0], s);
    axpy(d_proj[0], c.att_proj[j], s);
  }

  // attention projection, intersection-wise weighting, feature extractor
  Vec& d_int_row = g.d_int_rows[c.scenario]
                       .try_emplace(c.intersection, Vec(c.n_nodes, 0.0))
                       .first->second;
  for (int j = 0; j < c.n_nodes; ++j) {
    add_outer(g.d_w_att, c.weighted[j], d_proj[j]);
    const Vec d_weighted = mul_t(p.w_att, d_proj[j]);
    d_int_row[j] += dot(d_weighted, c.psi[j]);
    axpy(d_psi[j], d_weighted, c.int_row[j]);

    const Vec d_pre = relu_grad_mask(c.psi_pre[j], d_psi[j]);
    add_outer(g.d_w_feat, c.obs[j], d_pre);
    axpy(g.d_b_feat, d_pre);
  }
}

GradientSet backward(const ForwardCache& cache, const Vec& dq) {
  GradientSet g = GradientSet::zeros(cache.params->dims);
  backward_into(cache, dq, g);
  return g;
}

SharedParams snapshot(const SharedParams& params) {
  SharedParams copy = params;
  copy.version = 0;
  return copy;
}

void load(SharedParams& target, const SharedParams& source) {
  const uint64_t version = target.version;
  target = source;
  target.version = version + 1;
}

}  // namespace dualight::qkernel
