#pragma once

#include <cstddef>
#include <deque>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "breath/stream.hpp"

namespace breath {

struct VigilConfig {
  std::size_t capacity = 20;       // K most recent inhale-to-inhale intervals
  double ci_level = 0.80;          // two-sided interval over individual intervals
  double floor_seconds = 0.5;      // bound is never below mean + floor
  std::size_t min_arrest = 5;      // arrest test armed from this many intervals
  double alpha = 0.05;             // one-sided slope test level
  std::size_t min_trend = 8;       // slope test needs this many intervals

  void validate() const;
};

// Ring buffer of inhale-onset-to-inhale-onset durations.
class IntervalSeries {
 public:
  explicit IntervalSeries(std::size_t capacity = 20);

  // Inhales append an interval (after the first) and refresh the last-breath
  // time; exhales only refresh it. Throws Errc::non_monotonic_time unless
  // event.time is later than the last breath.
  void push(const BreathEvent& event);

  std::vector<double> intervals() const { return {intervals_.begin(), intervals_.end()}; }
  std::size_t size() const noexcept { return intervals_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }
  std::optional<double> last_breath_time() const noexcept { return last_breath_; }
  std::optional<double> last_inhale_time() const noexcept { return last_inhale_; }

 private:
  std::size_t capacity_;
  std::deque<double> intervals_;
  std::optional<double> last_breath_;
  std::optional<double> last_inhale_;
};

enum class AlertKind { arrest, trend };

std::string_view to_string(AlertKind kind) noexcept;

struct Alert {
  AlertKind kind = AlertKind::arrest;
  double time = 0.0;
  double statistic = 0.0;  // elapsed seconds (arrest) or slope t-value (trend)
  double threshold = 0.0;
};

// mean + t_{(1+ci)/2, n-1} * s, floored at mean + floor_seconds. Empty when
// fewer than min_arrest intervals are buffered.
std::optional<double> arrest_bound(std::span<const double> intervals, const VigilConfig& config);

// Alerts when now - last_breath_time exceeds arrest_bound.
std::optional<Alert> arrest_check(const IntervalSeries& series, double now, const VigilConfig& config = {});

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double standard_error = 0.0;
  double t = 0.0;  // slope / standard_error; +inf for an exact rising line
};

// Ordinary least squares of y_i on i = 0..n-1 (n >= 3).
SlopeFit fit_slope(std::span<const double> y);

// One-sided test for a positive slope at level alpha; alert time is the last
// breath time. Empty below min_trend intervals or when not significant.
std::optional<Alert> slope_check(const IntervalSeries& series, const VigilConfig& config = {});

}  // namespace breath
