#include "breath/simulate.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

namespace breath {

DetectionScore score_events(const GroundTruth& truth, std::span<const BreathEvent> events, double tolerance) {
  DetectionScore s;
  s.truth_count = truth.onsets.size();
  std::vector<bool> taken(truth.onsets.size(), false);
  for (const BreathEvent& e : events) {
    std::optional<std::size_t> best;
    double best_gap = tolerance;
    for (std::size_t i = 0; i < truth.onsets.size(); ++i) {
      const BreathOnset& o = truth.onsets[i];
      if (taken[i] || o.kind != e.kind) continue;
      const double gap = std::abs(o.time - e.time);
      if (gap <= best_gap) {
        best_gap = gap;
        best = i;
      }
    }
    if (best) {
      taken[*best] = true;
      ++s.matched;
    } else {
      ++s.false_positives;
    }
  }
  s.recall = s.truth_count == 0 ? 1.0 : static_cast<double>(s.matched) / static_cast<double>(s.truth_count);
  return s;
}

std::optional<AlertRecord> SimulationReport::first(AlertKind kind) const {
  for (const AlertRecord& r : alerts) {
    if (r.alert.kind == kind) return r;
  }
  return std::nullopt;
}

SimulationReport simulate(const AEParams& ae, const RNNParams& rnn, const ScenarioSpec& spec,
                          const MonitorConfig& config, double tolerance) {
  const Scenario scenario = gen_scenario(spec);
  ClipFrameSource source(scenario.audio);
  const MonitorLog log = run_monitor(ae, rnn, source, config);

  SimulationReport report;
  report.spec = spec;
  report.events = log.events;
  report.detection = score_events(scenario.truth, log.events, tolerance);
  if (!scenario.truth.onsets.empty()) report.last_truth_breath = scenario.truth.onsets.back().time;
  for (const Alert& a : log.alerts) {
    AlertRecord r{a, a.time - spec.onset, std::nullopt};
    for (const BreathOnset& o : scenario.truth.onsets) {
      if (o.time <= a.time) r.since_last_breath = a.time - o.time;
    }
    report.alerts.push_back(r);
  }
  return report;
}

void write_report(std::ostream& out, const SimulationReport& report) {
  out << std::fixed << std::setprecision(3);
  out << "scenario," << to_string(report.spec.kind) << '\n';
  out << "seed," << report.spec.seed << '\n';
  out << "duration_s," << report.spec.duration << '\n';
  out << "onset_s," << report.spec.onset << '\n';
  out << "truth_breaths," << report.detection.truth_count << '\n';
  out << "detected_events," << report.events.size() << '\n';
  out << "matched," << report.detection.matched << '\n';
  out << "breath_recall," << std::setprecision(4) << report.detection.recall << std::setprecision(3) << '\n';
  out << "false_positives," << report.detection.false_positives << '\n';
  if (report.last_truth_breath) out << "last_truth_breath_s," << *report.last_truth_breath << '\n';
  out << "alerts," << report.alerts.size() << '\n';
  for (const AlertRecord& r : report.alerts) {
    out << "alert," << r.alert.time << ',' << to_string(r.alert.kind) << ',' << r.alert.statistic << ','
        << r.alert.threshold << ',' << r.since_onset << ',';
    if (r.since_last_breath) out << *r.since_last_breath;
    out << '\n';
  }
}

}  // namespace breath
