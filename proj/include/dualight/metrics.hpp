#pragma once

#include <vector>

#include "dualight/sim.hpp"

namespace dualight::evalkit {

struct MetricsReport {
  double avg_delay_s = 0.0;
  double avg_trip_s = 0.0;
  double avg_wait_s = 0.0;
  int finished = 0;
  int unfinished = 0;
};

/// Per-vehicle: trip = finish - spawn, delay = trip - route free-flow
/// time, wait = accumulated queue seconds. Vehicles unfinished at episode
/// end are scored with finish = episode end. Averages run over all
/// spawned vehicles; an empty log yields zeros.
MetricsReport compute_metrics(const std::vector<simnet::VehicleRecord>& logs,
                              int episode_length_s);

struct MetricsSummary {
  double mean_delay = 0.0, std_delay = 0.0;
  double mean_trip = 0.0, std_trip = 0.0;
  double mean_wait = 0.0, std_wait = 0.0;
  int runs = 0;
};

MetricsSummary summarize(const std::vector<MetricsReport>& reports);

}  // namespace dualight::evalkit
