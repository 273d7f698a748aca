#include "dualight/xscen.hpp"

#include <algorithm>
#include <cmath>

namespace dualight::xscen {

double cosine_similarity(const Vec& u, const Vec& v) {
  const double uu = dot(u, u);
  const double vv = dot(v, v);
  if (uu == 0.0 || vv == 0.0) return 0.0;
  return dot(u, v) / (std::sqrt(uu) * std::sqrt(vv));
}

std::vector<CrossRef> topk_cross_neighbors(
    const std::vector<std::vector<Vec>>& embeddings, int scenario,
    int intersection, int k_x) {
  const Vec& query = embeddings[scenario][intersection];
  std::vector<CrossRef> cands;
  for (size_t k = 0; k < embeddings.size(); ++k) {
    if (static_cast<int>(k) == scenario) continue;
    for (size_t i = 0; i < embeddings[k].size(); ++i) {
      cands.push_back({static_cast<int>(k), static_cast<int>(i),
                       cosine_similarity(query, embeddings[k][i])});
    }
  }
  std::sort(cands.begin(), cands.end(), [](const CrossRef& a, const CrossRef& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    if (a.scenario != b.scenario) return a.scenario < b.scenario;
    return a.intersection < b.intersection;
  });
  std::vector<CrossRef> out;
  for (int j = 0; j < k_x; ++j) {
    if (j < static_cast<int>(cands.size())) {
      out.push_back(cands[j]);
    } else {
      out.push_back({-1, -1, 0.0});  // SELF padding
    }
  }
  return out;
}

CrossNeighborMap build_cross_map(const std::vector<std::vector<Vec>>& embeddings,
                                 int k_x, uint64_t refresh_step) {
  CrossNeighborMap map;
  map.refresh_step = refresh_step;
  map.entries.resize(embeddings.size());
  for (size_t k = 0; k < embeddings.size(); ++k) {
    map.entries[k].resize(embeddings[k].size());
    for (size_t i = 0; i < embeddings[k].size(); ++i) {
      map.entries[k][i] = topk_cross_neighbors(embeddings, static_cast<int>(k),
                                               static_cast<int>(i), k_x);
    }
  }
  return map;
}

std::vector<std::vector<Vec>> embed_observations(
    const qkernel::SharedParams& params,
    const std::vector<std::vector<Vec>>& observations) {
  std::vector<std::vector<Vec>> out(observations.size());
  for (size_t k = 0; k < observations.size(); ++k) {
    out[k].reserve(observations[k].size());
    for (const Vec& obs : observations[k]) {
      out[k].push_back(qkernel::feature_embedding(params, obs));
    }
  }
  return out;
}

}  // namespace dualight::xscen
