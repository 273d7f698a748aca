#include "dualight/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dualight/errors.hpp"
#include "dualight/standardize.hpp"

namespace dualight::simnet {

using nlohmann::json;

namespace {

const json& require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ParseError(where + ": missing required key '" + key + "'");
  }
  return *it;
}

int to_int(const json& v, const std::string& where) {
  if (!v.is_number_integer()) throw ParseError(where + ": expected an integer");
  return v.get<int>();
}

double to_num(const json& v, const std::string& where) {
  if (!v.is_number()) throw ParseError(where + ": expected a number");
  return v.get<double>();
}

ScenarioSpec parse_spec(const json& j, const std::string& path) {
  ScenarioSpec spec;
  spec.source_path = path;
  spec.scenario_id = to_int(require(j, "scenario_id", path), path + ".scenario_id");
  if (j.contains("episode_length_s")) {
    spec.episode_length_s = to_int(j["episode_length_s"], path + ".episode_length_s");
  }
  if (j.contains("decision_interval_s")) {
    spec.decision_interval_s =
        to_int(j["decision_interval_s"], path + ".decision_interval_s");
  }

  const json& inters = require(j, "intersections", path);
  for (size_t i = 0; i < inters.size(); ++i) {
    const std::string where = "intersections[" + std::to_string(i) + "]";
    const json& ji = inters[i];
    IntersectionSpec inter;
    inter.id = to_int(require(ji, "id", where), where + ".id");
    inter.x = to_num(require(ji, "x", where), where + ".x");
    inter.y = to_num(require(ji, "y", where), where + ".y");
    const json& arms = require(ji, "arms", where);
    for (size_t a = 0; a < arms.size(); ++a) {
      const std::string aw = where + ".arms[" + std::to_string(a) + "]";
      ArmSpec arm;
      arm.angle_deg = to_num(require(arms[a], "angle_deg", aw), aw + ".angle_deg");
      for (const auto& m : require(arms[a], "movements", aw)) {
        arm.movements.push_back(parse_turn(m.get<std::string>()));
      }
      inter.arms.push_back(std::move(arm));
    }
    if (ji.contains("ftc")) {
      for (const auto& e : ji["ftc"]) {
        if (!e.is_array() || e.size() != 2) {
          throw ParseError(where + ".ftc: entries must be [phase, duration_s]");
        }
        inter.ftc.push_back({to_int(e[0], where + ".ftc"), to_int(e[1], where + ".ftc")});
      }
    }
    spec.intersections.push_back(std::move(inter));
  }

  if (j.contains("boundaries")) {
    for (size_t i = 0; i < j["boundaries"].size(); ++i) {
      const std::string where = "boundaries[" + std::to_string(i) + "]";
      const json& jb = j["boundaries"][i];
      spec.boundaries.push_back({to_int(require(jb, "id", where), where + ".id"),
                                 to_num(require(jb, "x", where), where + ".x"),
                                 to_num(require(jb, "y", where), where + ".y")});
    }
  }

  const json& links = require(j, "links", path);
  for (size_t i = 0; i < links.size(); ++i) {
    const std::string where = "links[" + std::to_string(i) + "]";
    const json& jl = links[i];
    Link link;
    link.from = to_int(require(jl, "from", where), where + ".from");
    link.to = to_int(require(jl, "to", where), where + ".to");
    link.free_flow_s = to_int(require(jl, "free_flow_s", where), where + ".free_flow_s");
    if (jl.contains("saturation_vps")) {
      link.saturation_vps = to_num(jl["saturation_vps"], where + ".saturation_vps");
    }
    spec.links.push_back(link);
  }

  const json& flows = require(j, "flows", path);
  for (size_t i = 0; i < flows.size(); ++i) {
    const std::string where = "flows[" + std::to_string(i) + "]";
    const json& jf = flows[i];
    FlowSpec flow;
    for (const auto& hop : require(jf, "route", where)) {
      if (!hop.is_array() || hop.size() != 2) {
        throw ParseError(where + ".route: hops must be [link_id, movement]");
      }
      flow.route.push_back(
          {to_int(hop[0], where + ".route"), parse_turn(hop[1].get<std::string>())});
    }
    flow.rate_vph = to_num(require(jf, "rate_vph", where), where + ".rate_vph");
    flow.start_s = to_int(require(jf, "start_s", where), where + ".start_s");
    flow.end_s = to_int(require(jf, "end_s", where), where + ".end_s");
    spec.flows.push_back(std::move(flow));
  }

  return spec;
}

}  // namespace

void validate_scenario(const ScenarioSpec& spec) {
  if (spec.intersections.empty()) throw ValidationError("no intersections");
  if (spec.episode_length_s <= 0) throw ValidationError("episode_length_s must be > 0");
  if (spec.decision_interval_s <= 0) {
    throw ValidationError("decision_interval_s must be > 0");
  }
  if (spec.episode_length_s % spec.decision_interval_s != 0) {
    throw ValidationError("decision_interval_s must divide episode_length_s");
  }

  std::set<int> node_ids;
  for (const auto& inter : spec.intersections) {
    const std::string where = "intersection " + std::to_string(inter.id);
    if (!node_ids.insert(inter.id).second) {
      throw ValidationError(where + ": duplicate id");
    }
    if (inter.arms.size() < 2 || inter.arms.size() > 4) {
      throw ValidationError(where + ": must have between 2 and 4 arms, has " +
                            std::to_string(inter.arms.size()));
    }
    for (size_t a = 0; a < inter.arms.size(); ++a) {
      for (size_t b = a + 1; b < inter.arms.size(); ++b) {
        if (inter.arms[a].angle_deg == inter.arms[b].angle_deg) {
          throw ValidationError(where + ": arm angles must be pairwise distinct");
        }
      }
    }
  }
  for (const auto& b : spec.boundaries) {
    if (!node_ids.insert(b.id).second) {
      throw ValidationError("boundary " + std::to_string(b.id) + ": duplicate id");
    }
  }

  for (size_t li = 0; li < spec.links.size(); ++li) {
    const std::string where = "links[" + std::to_string(li) + "]";
    const Link& link = spec.links[li];
    if (!node_ids.count(link.from) || !node_ids.count(link.to)) {
      throw ValidationError(where + ": endpoint references an undeclared node");
    }
    if (link.from == link.to) throw ValidationError(where + ": self loop");
    if (link.free_flow_s < 1) throw ValidationError(where + ": free_flow_s must be >= 1");
    if (link.saturation_vps <= 0) {
      throw ValidationError(where + ": saturation_vps must be > 0");
    }
  }

  // Arm/slot geometry and link bindings (throws on inconsistent layouts).
  ScenarioTables tables = build_tables(spec);

  for (size_t fi = 0; fi < spec.flows.size(); ++fi) {
    const std::string where = "flows[" + std::to_string(fi) + "]";
    const FlowSpec& flow = spec.flows[fi];
    if (flow.route.empty()) throw ValidationError(where + ": empty route");
    if (flow.rate_vph < 0) throw ValidationError(where + ": rate_vph must be >= 0");
    if (flow.start_s < 0 || flow.start_s >= flow.end_s ||
        flow.end_s > spec.episode_length_s) {
      throw ValidationError(where + ": need 0 <= start_s < end_s <= episode_length_s");
    }
    for (size_t h = 0; h < flow.route.size(); ++h) {
      const RouteHop& hop = flow.route[h];
      const bool last = h + 1 == flow.route.size();
      if (hop.link < 0 || hop.link >= static_cast<int>(spec.links.size())) {
        throw ValidationError(where + ": hop " + std::to_string(h) +
                              " references unknown link " + std::to_string(hop.link));
      }
      const auto& binding = tables.link_bindings[hop.link];
      if (binding.to_index < 0) {
        // Downstream end is a boundary: the vehicle leaves the network at
        // the end of this link, so it must be the final hop.
        if (!last) {
          throw ValidationError(where + ": hop " + std::to_string(h) +
                                " ends at a boundary before the route does");
        }
        continue;
      }
      const StdIntersection& sd = tables.intersections[binding.to_index];
      const int slot = binding.to_slot;
      const bool present =
          hop.movement == Turn::kRight
              ? sd.right_present[slot]
              : sd.movement_present[movement_index(slot, hop.movement)];
      if (!present) {
        throw ValidationError(where + ": hop " + std::to_string(h) + " takes " +
                              turn_name(hop.movement) + " at intersection " +
                              std::to_string(sd.id) +
                              " but that movement is not declared on the arm");
      }
      if (!last) {
        const int out = sd.out_link[exit_slot(slot, hop.movement)];
        const int next = flow.route[h + 1].link;
        if (out != next) {
          throw ValidationError(
              where + ": route is disconnected at hop " + std::to_string(h) +
              " (movement exits onto link " + std::to_string(out) +
              " but the route continues on link " + std::to_string(next) + ")");
        }
      }
    }
  }

  // Fixed-time schedules, when present, must fit the phase grid.
  for (const auto& inter : spec.intersections) {
    if (inter.ftc.empty()) continue;
    const StdIntersection& sd = tables.intersections[tables.index_of(inter.id)];
    for (const auto& entry : inter.ftc) {
      const std::string where = "intersection " + std::to_string(inter.id) + ".ftc";
      if (entry.phase < 0 || entry.phase >= kNumPhases) {
        throw ValidationError(where + ": phase out of range");
      }
      if (!sd.valid_phase[entry.phase]) {
        throw ValidationError(where + ": phase " + phase_name(entry.phase) +
                              " is not valid for this intersection");
      }
      if (entry.duration_s <= 0 || entry.duration_s % spec.decision_interval_s != 0) {
        throw ValidationError(where +
                              ": durations must be positive multiples of the "
                              "decision interval");
      }
    }
  }
}

ScenarioSpec load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
  ScenarioSpec spec = parse_spec(j, path);
  validate_scenario(spec);
  return spec;
}

}  // namespace dualight::simnet
