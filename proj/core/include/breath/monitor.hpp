#pragma once

#include <optional>
#include <vector>

#include "breath/stream.hpp"
#include "breath/vigil.hpp"

namespace breath {

struct MonitorConfig {
  DebounceConfig debounce;
  VigilConfig vigil;
};

// Frames in, breath events and alerts out.
//
// Events are stamped at the onset of their first accepting window, so an
// event at time T is only known once the prediction ending at
// T + window + (run_length - 1) * hop has been seen. Arrest checks therefore
// run on that settled horizon rather than on the raw stream clock; otherwise
// the detection delay itself would read as a breath gap. Alerts carry the
// stream time at which they were raised.
//
// An arrest alert fires once per silent gap and re-arms on the next breath.
// A trend alert fires when the slope test becomes significant and re-arms
// once it stops being significant.
class Monitor {
 public:
  Monitor(const AEParams& ae, const RNNParams& rnn, MonitorConfig config = {});

  struct Step {
    std::optional<PredictionFrame> prediction;
    std::optional<BreathEvent> event;
    std::vector<Alert> alerts;
  };

  Step push(const TimeFrame& frame);

  const IntervalSeries& series() const noexcept { return series_; }
  double horizon_lag() const noexcept;

 private:
  MonitorConfig config_;
  StreamInferencer inferencer_;
  Debouncer debouncer_;
  IntervalSeries series_;
  bool arrest_latched_ = false;
  bool trend_latched_ = false;
};

struct MonitorLog {
  std::vector<PredictionFrame> predictions;
  std::vector<BreathEvent> events;
  std::vector<Alert> alerts;
};

MonitorLog run_monitor(const AEParams& ae, const RNNParams& rnn, FrameSource& source,
                       const MonitorConfig& config = {});

}  // namespace breath
