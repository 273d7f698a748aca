#pragma once

#include <array>
#include <string>

namespace dualight::simnet {

/// Relative arm slots after standardization. Slot angles are multiples of
/// 90 degrees measured counterclockwise from +x; which compass direction
/// slot 0 lands on depends on the physical arm layout and is irrelevant
/// to the controller, only relative geometry matters.
inline constexpr int kNumSlots = 4;

enum class Turn : int { kThrough = 0, kLeft = 1, kRight = 2 };

/// Canonical signalised movements: (slot, through|left). Right turns are
/// uncontrolled and live outside this indexing.
inline constexpr int kNumMovements = 8;

inline constexpr int movement_index(int slot, Turn t) {
  return slot * 2 + (t == Turn::kLeft ? 1 : 0);
}
inline constexpr int movement_slot(int movement) { return movement / 2; }
inline constexpr Turn movement_turn(int movement) {
  return movement % 2 == 0 ? Turn::kThrough : Turn::kLeft;
}

/// Exit slot of a movement entering at `slot`, under right-hand traffic
/// with slots ordered counterclockwise.
inline constexpr int exit_slot(int slot, Turn t) {
  switch (t) {
    case Turn::kThrough:
      return (slot + 2) % kNumSlots;
    case Turn::kLeft:
      return (slot + 3) % kNumSlots;
    case Turn::kRight:
      return (slot + 1) % kNumSlots;
  }
  return slot;
}

inline constexpr int kNumPhases = 8;

/// The fixed phase table: each phase grants green to two non-conflicting
/// canonical movements. Phases 0-3 pair opposing arms (through, then
/// left); phases 4-7 give one arm both its movements.
inline constexpr std::array<std::array<int, 2>, kNumPhases> kPhaseMovements = {{
    {movement_index(0, Turn::kThrough), movement_index(2, Turn::kThrough)},
    {movement_index(1, Turn::kThrough), movement_index(3, Turn::kThrough)},
    {movement_index(0, Turn::kLeft), movement_index(2, Turn::kLeft)},
    {movement_index(1, Turn::kLeft), movement_index(3, Turn::kLeft)},
    {movement_index(0, Turn::kThrough), movement_index(0, Turn::kLeft)},
    {movement_index(1, Turn::kThrough), movement_index(1, Turn::kLeft)},
    {movement_index(2, Turn::kThrough), movement_index(2, Turn::kLeft)},
    {movement_index(3, Turn::kThrough), movement_index(3, Turn::kLeft)},
}};

std::string movement_name(int movement);
std::string phase_name(int phase);

Turn parse_turn(const std::string& s);
std::string turn_name(Turn t);

}  // namespace dualight::simnet
