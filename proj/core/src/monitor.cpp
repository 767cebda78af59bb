#include "breath/monitor.hpp"

namespace breath {

Monitor::Monitor(const AEParams& ae, const RNNParams& rnn, MonitorConfig config)
    : config_(config),
      inferencer_(ae, rnn),
      debouncer_(config.debounce),
      series_(config.vigil.capacity) {
  config_.vigil.validate();
}

double Monitor::horizon_lag() const noexcept {
  const double runs = config_.debounce.run_length > 0 ? static_cast<double>(config_.debounce.run_length - 1) : 0.0;
  return config_.debounce.window_seconds + runs * kFrameSeconds;
}

Monitor::Step Monitor::push(const TimeFrame& frame) {
  Step step;
  step.prediction = inferencer_.push(frame);
  if (!step.prediction) return step;
  const double now = step.prediction->end_time;

  step.event = debouncer_.push(*step.prediction);
  if (step.event) {
    series_.push(*step.event);
    arrest_latched_ = false;
    if (step.event->kind == Label::inhale) {
      auto trend = slope_check(series_, config_.vigil);
      if (trend && !trend_latched_) {
        trend->time = now;
        step.alerts.push_back(*trend);
      }
      trend_latched_ = trend.has_value();
    }
  }

  if (!arrest_latched_) {
    if (auto arrest = arrest_check(series_, now - horizon_lag(), config_.vigil)) {
      arrest->time = now;
      step.alerts.push_back(*arrest);
      arrest_latched_ = true;
    }
  }
  return step;
}

MonitorLog run_monitor(const AEParams& ae, const RNNParams& rnn, FrameSource& source,
                       const MonitorConfig& config) {
  Monitor monitor(ae, rnn, config);
  MonitorLog log;
  while (auto frame = source.next()) {
    Monitor::Step step = monitor.push(*frame);
    if (step.prediction) log.predictions.push_back(*step.prediction);
    if (step.event) log.events.push_back(*step.event);
    log.alerts.insert(log.alerts.end(), step.alerts.begin(), step.alerts.end());
  }
  return log;
}

}  // namespace breath
