#include "breath/vigil.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "breath/error.hpp"
#include "breath/student_t.hpp"

namespace breath {

void VigilConfig::validate() const {
  if (capacity < 3) throw Error(Errc::config_error, "interval capacity must be at least 3");
  if (!(ci_level > 0.0 && ci_level < 1.0)) throw Error(Errc::config_error, "ci_level must lie in (0, 1)");
  if (!(alpha > 0.0 && alpha < 0.5)) throw Error(Errc::config_error, "alpha must lie in (0, 0.5)");
  if (!(floor_seconds >= 0.0)) throw Error(Errc::config_error, "floor must be non-negative");
  if (min_arrest < 2) throw Error(Errc::config_error, "arrest test needs at least 2 intervals");
  if (min_trend < 3) throw Error(Errc::config_error, "slope test needs at least 3 intervals");
}

IntervalSeries::IntervalSeries(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw Error(Errc::domain_error, "interval capacity must be positive");
}

void IntervalSeries::push(const BreathEvent& event) {
  if (last_breath_ && !(event.time > *last_breath_)) {
    throw Error(Errc::non_monotonic_time, "breath at " + std::to_string(event.time) +
                                              " s does not follow " + std::to_string(*last_breath_) + " s");
  }
  last_breath_ = event.time;
  if (event.kind != Label::inhale) return;
  if (last_inhale_) {
    intervals_.push_back(event.time - *last_inhale_);
    if (intervals_.size() > capacity_) intervals_.pop_front();
  }
  last_inhale_ = event.time;
}

std::string_view to_string(AlertKind kind) noexcept {
  return kind == AlertKind::arrest ? "arrest" : "trend";
}

std::optional<double> arrest_bound(std::span<const double> intervals, const VigilConfig& config) {
  const std::size_t n = intervals.size();
  if (n < config.min_arrest || n < 2) return std::nullopt;
  const double mean = std::accumulate(intervals.begin(), intervals.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double v : intervals) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  const double q = t_quantile(0.5 * (1.0 + config.ci_level), static_cast<double>(n - 1));
  return std::max(mean + q * sd, mean + config.floor_seconds);
}

std::optional<Alert> arrest_check(const IntervalSeries& series, double now, const VigilConfig& config) {
  const auto last = series.last_breath_time();
  if (!last) return std::nullopt;
  const std::vector<double> iv = series.intervals();
  const auto bound = arrest_bound(iv, config);
  if (!bound) return std::nullopt;
  const double elapsed = now - *last;
  if (elapsed > *bound) return Alert{AlertKind::arrest, now, elapsed, *bound};
  return std::nullopt;
}

SlopeFit fit_slope(std::span<const double> y) {
  const std::size_t n = y.size();
  if (n < 3) throw Error(Errc::domain_error, "slope fit needs at least 3 points");
  const double xbar = static_cast<double>(n - 1) / 2.0;
  const double ybar = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double sxx = 0.0;
  double sxy = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = static_cast<double>(i) - xbar;
    sxx += dx * dx;
    sxy += dx * (y[i] - ybar);
    scale = std::max(scale, std::abs(y[i]));
  }
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = ybar - fit.slope * xbar;
  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * static_cast<double>(i));
    sse += r * r;
  }
  fit.standard_error = std::sqrt(sse / static_cast<double>(n - 2)) / std::sqrt(sxx);

  // Residuals at rounding level mean an exact line: SE = 0.
  const double tiny = 1e-12 * std::max(scale, 1e-300);
  if (fit.standard_error <= tiny) {
    fit.standard_error = 0.0;
    if (std::abs(fit.slope) <= tiny) {
      fit.slope = 0.0;
      fit.t = 0.0;
    } else {
      fit.t = std::copysign(std::numeric_limits<double>::infinity(), fit.slope);
    }
    return fit;
  }
  fit.t = fit.slope / fit.standard_error;
  return fit;
}

std::optional<Alert> slope_check(const IntervalSeries& series, const VigilConfig& config) {
  if (series.size() < config.min_trend || series.size() < 3) return std::nullopt;
  const std::vector<double> iv = series.intervals();
  const SlopeFit fit = fit_slope(iv);
  const double critical = t_quantile(1.0 - config.alpha, static_cast<double>(iv.size() - 2));
  if (fit.t > critical) {
    return Alert{AlertKind::trend, series.last_breath_time().value_or(0.0), fit.t, critical};
  }
  return std::nullopt;
}

}  // namespace breath
