#pragma once

#include <array>
#include <vector>

#include "dualight/scenario.hpp"

namespace dualight::simnet {

/// Sentinel for neighbor-list padding: the agent stands in for the
/// missing neighbor and contributes its own observation.
inline constexpr int kSelf = -1;

inline constexpr int kNumNeighbors = 4;  // same-scenario neighbors per agent

/// An intersection mapped onto the canonical 4-slot relative frame.
struct StdIntersection {
  int id = 0;      // id from the scenario file
  int index = 0;   // dense index within the scenario (by ascending id)

  std::array<int, kNumSlots> arm_of_slot{};     // index into spec.arms, -1 if absent
  std::array<bool, kNumMovements> movement_present{};
  std::array<bool, kNumSlots> right_present{};
  std::array<bool, kNumPhases> valid_phase{};
  int initial_phase = 0;                        // lowest valid phase

  // Link bindings per slot (indices into ScenarioSpec::links, -1 if none).
  std::array<int, kNumSlots> in_link{};
  std::array<int, kNumSlots> out_link{};

  std::vector<int> neighbors;                   // dense indices, kSelf padding

  int num_valid_phases() const {
    int n = 0;
    for (bool v : valid_phase) n += v ? 1 : 0;
    return n;
  }
};

/// Assigns physical arms to relative slots (sorted by angle, nearest
/// quarter-turn slot, collisions probed to the next free slot), marks
/// movement presence from the arm declarations, and derives the valid
/// phase mask: a phase is valid iff at least one of its two movements is
/// present.
StdIntersection standardize_intersection(const IntersectionSpec& spec,
                                         const ScenarioSpec& all);

/// The n intersections nearest to `id` by Euclidean distance, excluding
/// itself; distance ties broken by ascending id; padded with kSelf when
/// fewer than n candidates exist. Returned as scenario file ids.
std::vector<int> nearest_neighbors(const ScenarioSpec& scenario, int id, int n);

/// Fully derived per-scenario tables: standardized intersections (with
/// slot/link bindings and neighbor lists as dense indices) plus lookup
/// maps used by the simulator.
struct ScenarioTables {
  std::vector<StdIntersection> intersections;   // dense, ascending id
  std::vector<int> ids;                         // dense index -> id
  // per link: dense downstream intersection index and entry slot, or -1
  // when the link ends at a boundary node; same for the upstream side.
  struct LinkBinding {
    int to_index = -1;
    int to_slot = -1;
    int from_index = -1;
    int from_slot = -1;
  };
  std::vector<LinkBinding> link_bindings;

  int index_of(int id) const;                   // throws UnknownIntersection
  int size() const { return static_cast<int>(intersections.size()); }
};

ScenarioTables build_tables(const ScenarioSpec& spec);

}  // namespace dualight::simnet
