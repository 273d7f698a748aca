#pragma once

#include <vector>

#include "dualight/qnet.hpp"

namespace dualight::xscen {

/// Number of cross-scenario neighbors appended to the 4 same-scenario
/// ones, enlarging the aggregation set to 1 + 9 nodes.
inline constexpr int kCrossNeighbors = 5;
inline constexpr int kTotalNeighbors = 9;

/// Cosine similarity in [-1, 1]; defined as 0 when either vector is zero.
double cosine_similarity(const Vec& u, const Vec& v);

struct CrossRef {
  int scenario = -1;      // -1: SELF padding
  int intersection = -1;
  double similarity = 0.0;
};

/// For each (scenario, intersection): the cross-scenario neighbors picked
/// by descending cosine similarity of the feature embeddings, ties broken
/// by ascending (scenario id, intersection id). Rebuilt at episode
/// boundaries; rollouts read it immutably.
struct CrossNeighborMap {
  std::vector<std::vector<std::vector<CrossRef>>> entries;  // [k][i][k_x]
  uint64_t refresh_step = 0;
};

/// Top k_x most similar intersections outside scenario k, padded with
/// SELF when fewer candidates exist. `embeddings[k][i]` is the feature
/// embedding of agent (k, i) under the current shared parameters.
std::vector<CrossRef> topk_cross_neighbors(
    const std::vector<std::vector<Vec>>& embeddings, int scenario,
    int intersection, int k_x);

CrossNeighborMap build_cross_map(const std::vector<std::vector<Vec>>& embeddings,
                                 int k_x, uint64_t refresh_step);

/// Embeds every agent's observation with the feature extractor, the input
/// to similarity computation.
std::vector<std::vector<Vec>> embed_observations(
    const qkernel::SharedParams& params,
    const std::vector<std::vector<Vec>>& observations);

}  // namespace dualight::xscen
