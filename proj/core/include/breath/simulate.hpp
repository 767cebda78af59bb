#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "breath/monitor.hpp"
#include "breath/synthgen.hpp"

namespace breath {

struct DetectionScore {
  std::size_t truth_count = 0;
  std::size_t matched = 0;
  std::size_t false_positives = 0;  // events with no same-kind onset within tolerance
  double recall = 0.0;
};

// Greedy one-to-one matching in event order: each event takes the nearest
// unmatched ground-truth onset of the same kind within `tolerance` seconds.
DetectionScore score_events(const GroundTruth& truth, std::span<const BreathEvent> events,
                            double tolerance = 1.0);

struct AlertRecord {
  Alert alert;
  double since_onset = 0.0;        // alert time - scenario onset
  std::optional<double> since_last_breath;  // alert time - last ground-truth onset before it
};

struct SimulationReport {
  ScenarioSpec spec;
  DetectionScore detection;
  std::vector<BreathEvent> events;
  std::vector<AlertRecord> alerts;
  std::optional<double> last_truth_breath;

  std::optional<AlertRecord> first(AlertKind kind) const;
};

SimulationReport simulate(const AEParams& ae, const RNNParams& rnn, const ScenarioSpec& spec,
                          const MonitorConfig& config = {}, double tolerance = 1.0);

// Line-oriented text report: "key,value" summary lines followed by one
// "alert,<time_s>,<kind>,<statistic>,<threshold>,<since_onset>,<since_last_breath>" line each.
void write_report(std::ostream& out, const SimulationReport& report);

}  // namespace breath
