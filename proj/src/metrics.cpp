#include "dualight/metrics.hpp"

#include <cmath>

namespace dualight::evalkit {

MetricsReport compute_metrics(const std::vector<simnet::VehicleRecord>& logs,
                              int episode_length_s) {
  MetricsReport report;
  if (logs.empty()) return report;
  double trip_total = 0.0, delay_total = 0.0, wait_total = 0.0;
  for (const auto& rec : logs) {
    const int finish = rec.finish_s >= 0 ? rec.finish_s : episode_length_s;
    const int trip = finish - rec.spawn_s;
    trip_total += trip;
    delay_total += trip - rec.free_flow_s;
    wait_total += rec.wait_s;
    if (rec.finish_s >= 0) {
      ++report.finished;
    } else {
      ++report.unfinished;
    }
  }
  const double n = static_cast<double>(logs.size());
  report.avg_trip_s = trip_total / n;
  report.avg_delay_s = delay_total / n;
  report.avg_wait_s = wait_total / n;
  return report;
}

MetricsSummary summarize(const std::vector<MetricsReport>& reports) {
  MetricsSummary s;
  s.runs = static_cast<int>(reports.size());
  if (reports.empty()) return s;
  const double n = static_cast<double>(reports.size());
  for (const auto& r : reports) {
    s.mean_delay += r.avg_delay_s;
    s.mean_trip += r.avg_trip_s;
    s.mean_wait += r.avg_wait_s;
  }
  s.mean_delay /= n;
  s.mean_trip /= n;
  s.mean_wait /= n;
  for (const auto& r : reports) {
    s.std_delay += (r.avg_delay_s - s.mean_delay) * (r.avg_delay_s - s.mean_delay);
    s.std_trip += (r.avg_trip_s - s.mean_trip) * (r.avg_trip_s - s.mean_trip);
    s.std_wait += (r.avg_wait_s - s.mean_wait) * (r.avg_wait_s - s.mean_wait);
  }
  s.std_delay = std::sqrt(s.std_delay / n);
  s.std_trip = std::sqrt(s.std_trip / n);
  s.std_wait = std::sqrt(s.std_wait / n);
  return s;
}

}  // namespace dualight::evalkit
