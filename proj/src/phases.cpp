#include "dualight/phases.hpp"

#include "dualight/errors.hpp"

namespace dualight::simnet {

std::string movement_name(int movement) {
  return "slot" + std::to_string(movement_slot(movement)) +
         (movement_turn(movement) == Turn::kThrough ? "-through" : "-left");
}

std::string phase_name(int phase) {
  static const char* names = "ABCDEFGH";
  if (phase < 0 || phase >= kNumPhases) return "?";
  return std::string(1, names[phase]);
}

Turn parse_turn(const std::string& s) {
  if (s == "through") return Turn::kThrough;
  if (s == "left") return Turn::kLeft;
  if (s == "right") return Turn::kRight;
  throw ParseError("unknown movement '" + s + "' (expected through/left/right)");
}

std::string turn_name(Turn t) {
  switch (t) {
    case Turn::kThrough:
      return "through";
    case Turn::kLeft:
      return "left";
    case Turn::kRight:
      return "right";
  }
  return "?";
}

}  // namespace dualight::simnet
