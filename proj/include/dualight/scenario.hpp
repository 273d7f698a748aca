#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dualight/phases.hpp"

namespace dualight::simnet {

struct ArmSpec {
  double angle_deg = 0.0;            // direction of the approach road, CCW from +x
  std::vector<Turn> movements;       // entrance-lane movements present on this arm
};

struct FtcEntry {
  int phase = 0;
  int duration_s = 0;
};

struct IntersectionSpec {
  int id = 0;
  double x = 0.0;
  double y = 0.0;
  std::vector<ArmSpec> arms;                 // 2..4 arms, pairwise distinct angles
  std::vector<FtcEntry> ftc;                 // optional fixed-time schedule
};

struct Link {
  int from = 0;                              // node id (intersection or boundary)
  int to = 0;
  int free_flow_s = 1;
  double saturation_vps = 1.0;               // discharge capacity per movement queue
};

struct RouteHop {
  int link = 0;                              // index into ScenarioSpec::links
  Turn movement = Turn::kThrough;            // taken at the link's downstream junction
};

struct FlowSpec {
  std::vector<RouteHop> route;
  double rate_vph = 0.0;
  int start_s = 0;
  int end_s = 0;
};

struct BoundaryNode {
  int id = 0;
  double x = 0.0;
  double y = 0.0;
};

struct ScenarioSpec {
  int scenario_id = 0;
  int episode_length_s = 3600;
  int decision_interval_s = 15;
  std::vector<IntersectionSpec> intersections;
  std::vector<BoundaryNode> boundaries;
  std::vector<Link> links;
  std::vector<FlowSpec> flows;
  std::string source_path;

  int num_steps() const { return episode_length_s / decision_interval_s; }
};

/// Parses and fully validates a scenario file (see docs/scenario.schema).
/// Throws ParseError on malformed input and ValidationError with the
/// offending field/flow named when the network is inconsistent.
ScenarioSpec load_scenario(const std::string& path);

/// Same validation applied to an in-memory spec (used by tests and by
/// load_scenario itself).
void validate_scenario(const ScenarioSpec& spec);

}  // namespace dualight::simnet
