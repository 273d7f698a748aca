#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "dualight/linalg.hpp"
#include "dualight/rng.hpp"

namespace dualight::qkernel {

struct DimConfig {
  int obs_dim = 16;        // F: raw observation length
  int feat_dim = 16;       // D: extracted feature width
  int att_dim = 32;        // D': attention projection width
  int num_phases = 8;      // p: Q head width (action space)
  int num_heads = 1;       // M
  int num_neighbors = 4;   // aggregated neighbors (9 with cross-scenario ones)

  int num_nodes() const { return 1 + num_neighbors; }
  bool operator==(const DimConfig&) const = default;
};

/// Parameters shared by every agent in every scenario: feature extractor,
/// attention projection, per-head value projections, and the Q head.
/// Row-vector convention throughout: x (1xN) times W (NxM).
struct SharedParams {
  DimConfig dims;
  Mat w_feat;                 // F x D
  Vec b_feat;                 // D
  Mat w_att;                  // D x D'
  std::vector<Mat> w_head;    // M of D' x D
  Mat w_out;                  // 2D x p
  Vec b_out;                  // p

  // Bumped on every in-place mutation; lets cached activations detect
  // that they were produced by different parameter values.
  uint64_t version = 0;

  bool same_values(const SharedParams& other) const;
};

/// Per-scenario experiential weight tables. Row i of intersection_w holds
/// the self weight (entry 0) followed by one scalar per neighbor in
/// neighbor-list order; row i of feature_w holds one weight per feature.
/// Both initialize to all-ones so the pipeline starts as the unweighted
/// one, and are only changed by gradient steps on their own scenario's
/// minibatches.
struct ExperientialWeights {
  std::vector<Mat> intersection_w;  // per scenario: N_k x (1 + num_neighbors)
  std::vector<Mat> feature_w;       // per scenario: N_k x D

  int num_scenarios() const { return static_cast<int>(intersection_w.size()); }
};

/// Everything the backward pass needs to replay the forward computation.
struct ForwardCache {
  const SharedParams* params = nullptr;
  uint64_t version = 0;
  int scenario = 0;
  int intersection = 0;
  int n_nodes = 0;                // 1 + num_neighbors; node 0 is self

  std::vector<Vec> obs;           // F per node
  std::vector<Vec> psi_pre;       // D per node, pre-activation
  std::vector<Vec> psi;           // D per node, relu(psi_pre)
  std::vector<Vec> weighted;      // D per node, intersection weight applied
  std::vector<Vec> att_proj;      // D' per node
  Vec att_logits;                 // n_nodes
  Vec att;                        // n_nodes, softmax of logits
  std::vector<Vec> value;         // D per node, head-averaged value path
  Vec agg_pre;                    // D, attention-pooled pre-activation
  Vec agg;                        // D, relu(agg_pre)  -- w_g
  Vec self_feat;                  // D, feature weight applied -- w_f
  Vec int_row;                    // copy of the intersection weight row
  Vec fea_row;                    // copy of the feature weight row
  Vec q;                          // p
};

/// Dense gradients for every shared tensor plus sparse row gradients for
/// the touched experiential rows (untouched rows are simply absent).
struct GradientSet {
  Mat d_w_feat;
  Vec d_b_feat;
  Mat d_w_att;
  std::vector<Mat> d_w_head;
  Mat d_w_out;
  Vec d_b_out;
  std::map<int, std::map<int, Vec>> d_int_rows;  // scenario -> row -> grad
  std::map<int, std::map<int, Vec>> d_fea_rows;

  static GradientSet zeros(const DimConfig& dims);
  void scale(double s);
};

/// Seeded initialization: shared tensors uniform on
/// [-1/sqrt(fan_in), +1/sqrt(fan_in)] per matrix (biases use their
/// layer's bound), experiential tables all-ones.
SharedParams init_shared(uint64_t seed, const DimConfig& dims);
ExperientialWeights init_experiential(const DimConfig& dims,
                                      const std::vector<int>& scenario_sizes);

/// The feature extractor alone: relu(obs * W_f + b_f). Also used to embed
/// observations for cross-scenario neighbor selection.
Vec feature_embedding(const SharedParams& params, const Vec& obs);

/// Full forward pass for agent `intersection` of scenario `scenario`:
/// extract features for self and neighbors, apply the intersection-wise
/// weights, pool with scaled dot-product attention (query = self), apply
/// the feature-wise weight to the self features, and map the
/// concatenation through the Q head. obs_neighbors must hold exactly
/// dims.num_neighbors vectors; padded slots carry the agent's own
/// observation.
ForwardCache forward(const SharedParams& params, const ExperientialWeights& emb,
                     int scenario, int intersection, const Vec& obs_self,
                     std::span<const Vec> obs_neighbors);

/// Accumulates d(dq . q)/d(params, emb rows) into `grads`. Throws
/// StaleCache when the parameters changed since the cache was produced.
void backward_into(const ForwardCache& cache, const Vec& dq, GradientSet& grads);
GradientSet backward(const ForwardCache& cache, const Vec& dq);

/// Deep copy / overwrite, used for the target network.
SharedParams snapshot(const SharedParams& params);
void load(SharedParams& target, const SharedParams& source);

}  // namespace dualight::qkernel
