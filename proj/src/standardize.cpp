#include "dualight/standardize.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "dualight/errors.hpp"

namespace dualight::simnet {

namespace {

double norm_deg(double a) {
  a = std::fmod(a, 360.0);
  if (a < 0) a += 360.0;
  return a;
}

double circ_dist_deg(double a, double b) {
  double d = std::fabs(norm_deg(a) - norm_deg(b));
  return std::min(d, 360.0 - d);
}

}  // namespace

StdIntersection standardize_intersection(const IntersectionSpec& spec,
                                         const ScenarioSpec& all) {
  StdIntersection out;
  out.id = spec.id;
  out.arm_of_slot.fill(-1);
  out.in_link.fill(-1);
  out.out_link.fill(-1);
  out.movement_present.fill(false);
  out.right_present.fill(false);

  // Arms sorted by angle; each claims the nearest quarter-turn slot,
  // probing counterclockwise when taken.
  std::vector<int> order(spec.arms.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return spec.arms[a].angle_deg < spec.arms[b].angle_deg;
  });
  for (int arm_idx : order) {
    const double ang = norm_deg(spec.arms[arm_idx].angle_deg);
    int slot = static_cast<int>(std::lround(ang / 90.0)) % kNumSlots;
    for (int probe = 0; probe < kNumSlots; ++probe) {
      int s = (slot + probe) % kNumSlots;
      if (out.arm_of_slot[s] < 0) {
        out.arm_of_slot[s] = arm_idx;
        break;
      }
    }
  }

  for (int slot = 0; slot < kNumSlots; ++slot) {
    int arm_idx = out.arm_of_slot[slot];
    if (arm_idx < 0) continue;
    for (Turn t : spec.arms[arm_idx].movements) {
      if (t == Turn::kRight) {
        out.right_present[slot] = true;
      } else {
        out.movement_present[movement_index(slot, t)] = true;
      }
    }
  }

  // A phase is valid iff at least one of its two movements is present.
  out.initial_phase = -1;
  for (int p = 0; p < kNumPhases; ++p) {
    out.valid_phase[p] = out.movement_present[kPhaseMovements[p][0]] ||
                         out.movement_present[kPhaseMovements[p][1]];
    if (out.valid_phase[p] && out.initial_phase < 0) out.initial_phase = p;
  }
  if (out.initial_phase < 0) {
    throw ValidationError("intersection " + std::to_string(spec.id) +
                          " has no valid phase (no through/left movements)");
  }
  (void)all;
  return out;
}

std::vector<int> nearest_neighbors(const ScenarioSpec& scenario, int id, int n) {
  if (n < 1) throw ValidationError("nearest_neighbors: n must be >= 1");
  const IntersectionSpec* self = nullptr;
  for (const auto& inter : scenario.intersections) {
    if (inter.id == id) self = &inter;
  }
  if (self == nullptr) {
    throw UnknownIntersection("unknown intersection id " + std::to_string(id));
  }

  struct Cand {
    double d2;
    int id;
  };
  std::vector<Cand> cands;
  for (const auto& inter : scenario.intersections) {
    if (inter.id == id) continue;
    const double dx = inter.x - self->x;
    const double dy = inter.y - self->y;
    cands.push_back({dx * dx + dy * dy, inter.id});
  }
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    if (a.d2 != b.d2) return a.d2 < b.d2;
    return a.id < b.id;
  });

  std::vector<int> out;
  for (int i = 0; i < n; ++i) {
    out.push_back(i < static_cast<int>(cands.size()) ? cands[i].id : kSelf);
  }
  return out;
}

int ScenarioTables::index_of(int id) const {
  for (int i = 0; i < size(); ++i) {
    if (ids[i] == id) return i;
  }
  throw UnknownIntersection("unknown intersection id " + std::to_string(id));
}

ScenarioTables build_tables(const ScenarioSpec& spec) {
  ScenarioTables tables;

  std::vector<const IntersectionSpec*> sorted;
  for (const auto& inter : spec.intersections) sorted.push_back(&inter);
  std::sort(sorted.begin(), sorted.end(),
            [](const IntersectionSpec* a, const IntersectionSpec* b) {
              return a->id < b->id;
            });

  std::map<int, int> index_by_id;
  for (const auto* inter : sorted) {
    StdIntersection sd = standardize_intersection(*inter, spec);
    sd.index = tables.size();
    index_by_id[inter->id] = sd.index;
    tables.ids.push_back(inter->id);
    tables.intersections.push_back(std::move(sd));
  }

  // Node positions for link geometry (intersections and boundaries).
  std::map<int, std::pair<double, double>> pos;
  for (const auto& inter : spec.intersections) pos[inter.id] = {inter.x, inter.y};
  for (const auto& b : spec.boundaries) pos[b.id] = {b.x, b.y};

  auto bind_side = [&](int link_idx, int node_id, int other_id, bool incoming) {
    auto it = index_by_id.find(node_id);
    if (it == index_by_id.end()) return std::pair<int, int>{-1, -1};
    StdIntersection& sd = tables.intersections[it->second];
    const IntersectionSpec* inter = sorted[it->second];
    const auto [ox, oy] = pos.at(other_id);
    const double bearing =
        std::atan2(oy - inter->y, ox - inter->x) * 180.0 / M_PI;
    int best_slot = -1;
    double best_d = 1e300;
    for (int slot = 0; slot < kNumSlots; ++slot) {
      int arm_idx = sd.arm_of_slot[slot];
      if (arm_idx < 0) continue;
      double d = circ_dist_deg(inter->arms[arm_idx].angle_deg, bearing);
      if (d < best_d) {
        best_d = d;
        best_slot = slot;
      }
    }
    if (best_slot < 0 || best_d > 45.0) {
      throw ValidationError(
          "link " + std::to_string(link_idx) + ": no arm of intersection " +
          std::to_string(node_id) + " within 45 degrees of its bearing");
    }
    int& binding = incoming ? sd.in_link[best_slot] : sd.out_link[best_slot];
    if (binding >= 0) {
      throw ValidationError("link " + std::to_string(link_idx) +
                            ": arm slot " + std::to_string(best_slot) +
                            " of intersection " + std::to_string(node_id) +
                            " already has an " + (incoming ? "entry" : "exit") +
                            " link");
    }
    binding = link_idx;
    return std::pair<int, int>{it->second, best_slot};
  };

  tables.link_bindings.resize(spec.links.size());
  for (size_t li = 0; li < spec.links.size(); ++li) {
    const Link& link = spec.links[li];
    auto [to_idx, to_slot] =
        bind_side(static_cast<int>(li), link.to, link.from, /*incoming=*/true);
    auto [from_idx, from_slot] =
        bind_side(static_cast<int>(li), link.from, link.to, /*incoming=*/false);
    tables.link_bindings[li] = {to_idx, to_slot, from_idx, from_slot};
  }

  for (auto& sd : tables.intersections) {
    std::vector<int> neigh_ids = nearest_neighbors(spec, sd.id, kNumNeighbors);
    sd.neighbors.clear();
    for (int nid : neigh_ids) {
      sd.neighbors.push_back(nid == kSelf ? kSelf : index_by_id.at(nid));
    }
  }

  return tables;
}

}  // namespace dualight::simnet
