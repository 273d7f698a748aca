#pragma once

#include <vector>

#include "dualight/sim.hpp"

namespace dualight::baselines {

struct FtcSchedule {
  std::vector<simnet::FtcEntry> entries;
  int cycle_s() const;
};

/// The phase whose interval contains (t mod cycle length).
int ftc_policy(const FtcSchedule& schedule, int t_s);

/// The intersection's schedule from the scenario file, or the default
/// round-robin over its valid phases at 30 s each.
FtcSchedule ftc_schedule_for(const simnet::ScenarioSpec& spec,
                             const simnet::StdIntersection& sd);

/// Sum over the phase's present movements of upstream queue minus the
/// queue at the head of the movement's exit link (0 when the exit leaves
/// the network). May be negative.
double pressure(const simnet::Sim& sim, int index, int phase);

/// argmax of pressure over the valid phases; ties to the lowest index.
int max_pressure_policy(const simnet::Sim& sim, int index);

}  // namespace dualight::baselines
