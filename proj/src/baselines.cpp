#include "dualight/baselines.hpp"

#include "dualight/errors.hpp"

namespace dualight::baselines {

using simnet::StdIntersection;

int FtcSchedule::cycle_s() const {
  int total = 0;
  for (const auto& e : entries) total += e.duration_s;
  return total;
}

int ftc_policy(const FtcSchedule& schedule, int t_s) {
  if (schedule.entries.empty()) throw ValidationError("empty fixed-time schedule");
  int t = t_s % schedule.cycle_s();
  for (const auto& e : schedule.entries) {
    if (t < e.duration_s) return e.phase;
    t -= e.duration_s;
  }
  return schedule.entries.back().phase;  // unreachable
}

FtcSchedule ftc_schedule_for(const simnet::ScenarioSpec& spec,
                             const StdIntersection& sd) {
  FtcSchedule schedule;
  for (const auto& inter : spec.intersections) {
    if (inter.id == sd.id && !inter.ftc.empty()) {
      schedule.entries = inter.ftc;
      return schedule;
    }
  }
  for (int p = 0; p < simnet::kNumPhases; ++p) {
    if (sd.valid_phase[p]) schedule.entries.push_back({p, 30});
  }
  return schedule;
}

double pressure(const simnet::Sim& sim, int index, int phase) {
  const StdIntersection& sd = sim.tables().intersections.at(index);
  if (phase < 0 || phase >= simnet::kNumPhases || !sd.valid_phase[phase]) {
    throw InvalidPhase("phase " + std::to_string(phase) +
                       " is not valid for intersection " + std::to_string(sd.id));
  }
  double total = 0.0;
  for (int movement : simnet::kPhaseMovements[phase]) {
    if (!sd.movement_present[movement]) continue;
    const int slot = simnet::movement_slot(movement);
    const simnet::Turn turn = simnet::movement_turn(movement);
    double downstream = 0.0;
    const int exit = sd.out_link[simnet::exit_slot(slot, turn)];
    if (exit >= 0) downstream = sim.queued_at_link_head(exit);
    total += sim.queue_len(index, movement) - downstream;
  }
  return total;
}

int max_pressure_policy(const simnet::Sim& sim, int index) {
  const StdIntersection& sd = sim.tables().intersections.at(index);
  int best = -1;
  double best_pressure = 0.0;
  for (int p = 0; p < simnet::kNumPhases; ++p) {
    if (!sd.valid_phase[p]) continue;
    const double pr = pressure(sim, index, p);
    if (best < 0 || pr > best_pressure) {
      best = p;
      best_pressure = pr;
    }
  }
  if (best < 0) throw NoValidPhase("no valid phase at intersection");
  return best;
}

}  // namespace dualight::baselines
