#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "breath/autoencoder.hpp"
#include "breath/dsp.hpp"
#include "breath/rnn.hpp"

namespace breath {

struct PredictionFrame {
  double end_time = 0.0;  // end of the 2 s window the prediction covers
  Label label = Label::unknown;
  double confidence = 0.0;
  ClassScores scores;
};

struct BreathEvent {
  double time = 0.0;  // onset of the first accepting window
  Label kind = Label::inhale;
};

// Pull-style frame supplier.
class FrameSource {
 public:
  virtual ~FrameSource() = default;
  virtual std::optional<TimeFrame> next() = 0;
};

// Plays back an in-memory clip; a trailing partial frame is dropped.
class ClipFrameSource final : public FrameSource {
 public:
  explicit ClipFrameSource(const AudioClip& clip) : clip_(clip) {}
  std::optional<TimeFrame> next() override;

 private:
  const AudioClip& clip_;
  std::size_t frame_ = 0;
};

// Raw signed 16-bit little-endian mono PCM at 8192 Hz, e.g. standard input.
// At most `max_samples` samples are consumed when given.
class PcmFrameSource final : public FrameSource {
 public:
  explicit PcmFrameSource(std::istream& in, std::optional<std::size_t> max_samples = std::nullopt)
      : in_(in), remaining_(max_samples) {}
  std::optional<TimeFrame> next() override;

 private:
  std::istream& in_;
  std::optional<std::size_t> remaining_;
  std::int64_t frame_ = 0;
};

// Sliding 16-frame window, hop one frame: after a 15-frame warm-up every new
// frame yields one prediction stamped with the window end time.
class StreamInferencer {
 public:
  StreamInferencer(const AEParams& ae, const RNNParams& rnn) : ae_(ae), rnn_(rnn) {}

  std::optional<PredictionFrame> push(const TimeFrame& frame);
  void reset();

 private:
  const AEParams& ae_;
  const RNNParams& rnn_;
  std::deque<LatentFrame> recent_;
};

std::vector<PredictionFrame> infer_stream(const AEParams& ae, const RNNParams& rnn, FrameSource& source);

struct DebounceConfig {
  double confidence = 0.99;
  std::size_t run_length = 3;
  double refractory = 1.0;
  double window_seconds = kWindowSeconds;
};

// A run is a maximal sequence of consecutive predictions sharing one breath
// label, each at or above the confidence threshold. The run_length-th member
// of a run emits one event timed at the onset of the run's first window,
// unless an event of the same kind was emitted less than `refractory`
// seconds earlier.
class Debouncer {
 public:
  explicit Debouncer(DebounceConfig config = {}) : config_(config) {}

  // Throws Errc::out_of_order_prediction unless end times strictly increase.
  std::optional<BreathEvent> push(const PredictionFrame& prediction);

  const DebounceConfig& config() const noexcept { return config_; }
  std::size_t runs_started() const noexcept { return runs_; }

 private:
  DebounceConfig config_;
  std::optional<double> last_end_;
  std::optional<Label> run_label_;
  std::size_t run_size_ = 0;
  double run_start_ = 0.0;
  std::size_t runs_ = 0;
  std::array<std::optional<double>, kNumClasses> last_event_{};
};

std::vector<BreathEvent> debounce(std::span<const PredictionFrame> predictions, const DebounceConfig& config = {});

}  // namespace breath
