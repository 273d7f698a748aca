#pragma once

// Programmatic scenario builders used by the unit and property tests.
// Grids have a full 4-arm intersection at every node, boundary nodes on
// the perimeter, and through demand along every row and column.

#include <map>
#include <string>
#include <vector>

#include "dualight/rng.hpp"
#include "dualight/scenario.hpp"

namespace testsup {

using namespace dualight::simnet;

struct GridOptions {
  int width = 3;
  int height = 3;
  double spacing_m = 200.0;
  int free_flow_s = 20;
  double saturation_vps = 1.0;
  double rate_we_vph = 360.0;  // per west->east route
  double rate_ew_vph = 360.0;
  double rate_ns_vph = 360.0;  // southbound
  double rate_sn_vph = 360.0;
  int episode_length_s = 3600;
  int decision_interval_s = 15;
  int scenario_id = 0;
};

class GridBuilder {
 public:
  explicit GridBuilder(const GridOptions& opt) : opt_(opt) {
    spec_.scenario_id = opt.scenario_id;
    spec_.episode_length_s = opt.episode_length_s;
    spec_.decision_interval_s = opt.decision_interval_s;
    build_nodes();
    build_links();
    build_flows();
  }

  const ScenarioSpec& spec() const { return spec_; }

  int link(int from, int to) const { return link_index_.at({from, to}); }
  int intersection_id(int col, int row) const { return row * opt_.width + col; }
  int boundary_id(char side, int index) const {
    return 1000 + side_base(side) + index;
  }

 private:
  static int side_base(char side) {
    switch (side) {
      case 'W':
        return 0;
      case 'E':
        return 100;
      case 'S':
        return 200;
      case 'N':
        return 300;
    }
    return 0;
  }

  void add_link(int from, int to) {
    link_index_[{from, to}] = static_cast<int>(spec_.links.size());
    spec_.links.push_back({from, to, opt_.free_flow_s, opt_.saturation_vps});
  }

  void build_nodes() {
    const double s = opt_.spacing_m;
    for (int r = 0; r < opt_.height; ++r) {
      for (int c = 0; c < opt_.width; ++c) {
        IntersectionSpec inter;
        inter.id = intersection_id(c, r);
        inter.x = c * s;
        inter.y = r * s;
        for (double angle : {0.0, 90.0, 180.0, 270.0}) {
          inter.arms.push_back({angle, {Turn::kThrough, Turn::kLeft}});
        }
        spec_.intersections.push_back(std::move(inter));
      }
    }
    for (int r = 0; r < opt_.height; ++r) {
      spec_.boundaries.push_back({boundary_id('W', r), -s, r * s});
      spec_.boundaries.push_back({boundary_id('E', r), opt_.width * s, r * s});
    }
    for (int c = 0; c < opt_.width; ++c) {
      spec_.boundaries.push_back({boundary_id('S', c), c * s, -s});
      spec_.boundaries.push_back({boundary_id('N', c), c * s, opt_.height * s});
    }
  }

  void build_links() {
    for (int r = 0; r < opt_.height; ++r) {
      for (int c = 0; c + 1 < opt_.width; ++c) {
        add_link(intersection_id(c, r), intersection_id(c + 1, r));
        add_link(intersection_id(c + 1, r), intersection_id(c, r));
      }
    }
    for (int c = 0; c < opt_.width; ++c) {
      for (int r = 0; r + 1 < opt_.height; ++r) {
        add_link(intersection_id(c, r), intersection_id(c, r + 1));
        add_link(intersection_id(c, r + 1), intersection_id(c, r));
      }
    }
    for (int r = 0; r < opt_.height; ++r) {
      add_link(boundary_id('W', r), intersection_id(0, r));
      add_link(intersection_id(0, r), boundary_id('W', r));
      add_link(boundary_id('E', r), intersection_id(opt_.width - 1, r));
      add_link(intersection_id(opt_.width - 1, r), boundary_id('E', r));
    }
    for (int c = 0; c < opt_.width; ++c) {
      add_link(boundary_id('S', c), intersection_id(c, 0));
      add_link(intersection_id(c, 0), boundary_id('S', c));
      add_link(boundary_id('N', c), intersection_id(c, opt_.height - 1));
      add_link(intersection_id(c, opt_.height - 1), boundary_id('N', c));
    }
  }

  void add_through_route(const std::vector<int>& nodes, double rate) {
    if (rate <= 0.0) return;
    FlowSpec flow;
    for (size_t n = 0; n + 1 < nodes.size(); ++n) {
      flow.route.push_back({link(nodes[n], nodes[n + 1]), Turn::kThrough});
    }
    flow.rate_vph = rate;
    flow.start_s = 0;
    flow.end_s = spec_.episode_length_s;
    spec_.flows.push_back(std::move(flow));
  }

  void build_flows() {
    for (int r = 0; r < opt_.height; ++r) {
      std::vector<int> we{boundary_id('W', r)};
      for (int c = 0; c < opt_.width; ++c) we.push_back(intersection_id(c, r));
      we.push_back(boundary_id('E', r));
      add_through_route(we, opt_.rate_we_vph);
      std::vector<int> ew(we.rbegin(), we.rend());
      add_through_route(ew, opt_.rate_ew_vph);
    }
    for (int c = 0; c < opt_.width; ++c) {
      std::vector<int> sn{boundary_id('S', c)};
      for (int r = 0; r < opt_.height; ++r) sn.push_back(intersection_id(c, r));
      sn.push_back(boundary_id('N', c));
      add_through_route(sn, opt_.rate_sn_vph);
      std::vector<int> ns(sn.rbegin(), sn.rend());
      add_through_route(ns, opt_.rate_ns_vph);
    }
  }

  GridOptions opt_;
  ScenarioSpec spec_;
  std::map<std::pair<int, int>, int> link_index_;
};

inline ScenarioSpec make_grid(const GridOptions& opt) {
  ScenarioSpec spec = GridBuilder(opt).spec();
  validate_scenario(spec);
  return spec;
}

/// A single 4-arm intersection with boundary links on every arm.
inline ScenarioSpec make_single(double rate_ns_vph = 360.0,
                                double rate_we_vph = 360.0,
                                int episode_length_s = 3600) {
  GridOptions opt;
  opt.width = 1;
  opt.height = 1;
  opt.rate_we_vph = rate_we_vph;
  opt.rate_ew_vph = 0.0;
  opt.rate_ns_vph = rate_ns_vph;
  opt.rate_sn_vph = 0.0;
  opt.episode_length_s = episode_length_s;
  return make_grid(opt);
}

/// A seeded random grid with random demand, for property tests.
inline ScenarioSpec random_grid(dualight::Rng& rng, int scenario_id = 0) {
  GridOptions opt;
  opt.scenario_id = scenario_id;
  opt.width = 1 + rng.uniform_int(3);
  opt.height = 1 + rng.uniform_int(3);
  opt.free_flow_s = 5 + rng.uniform_int(21);
  opt.rate_we_vph = rng.uniform_range(0.0, 700.0);
  opt.rate_ew_vph = rng.uniform_range(0.0, 700.0);
  opt.rate_ns_vph = rng.uniform_range(0.0, 700.0);
  opt.rate_sn_vph = rng.uniform_range(0.0, 700.0);
  return make_grid(opt);
}

}  // namespace testsup
