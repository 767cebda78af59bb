#include "breath/stream.hpp"

#include <array>
#include <cstring>
#include <istream>
#include <string>

#include "breath/error.hpp"

namespace breath {

std::optional<TimeFrame> ClipFrameSource::next() {
  const std::size_t begin = frame_ * kFrameLength;
  if (begin + kFrameLength > clip_.samples.size()) return std::nullopt;
  TimeFrame f;
  f.index = static_cast<std::int64_t>(frame_);
  for (std::size_t i = 0; i < kFrameLength; ++i) f.samples[i] = clip_.samples[begin + i];
  ++frame_;
  return f;
}

std::optional<TimeFrame> PcmFrameSource::next() {
  if (remaining_) {
    if (*remaining_ < kFrameLength) return std::nullopt;
    *remaining_ -= kFrameLength;
  }
  std::array<unsigned char, kFrameLength * 2> raw;
  in_.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in_.gcount()) != raw.size()) return std::nullopt;
  TimeFrame f;
  f.index = frame_++;
  for (std::size_t i = 0; i < kFrameLength; ++i) {
    const auto v = static_cast<std::int16_t>(static_cast<std::uint16_t>(raw[2 * i] | (raw[2 * i + 1] << 8)));
    f.samples[i] = pcm_to_amplitude(v);
  }
  return f;
}

std::optional<PredictionFrame> StreamInferencer::push(const TimeFrame& frame) {
  try {
    if (!recent_.empty() && frame.index != recent_.back().index + 1) {
      throw Error(Errc::out_of_order_prediction, "frame " + std::to_string(frame.index) +
                                                     " does not follow " +
                                                     std::to_string(recent_.back().index));
    }
    recent_.push_back(encode(ae_, spectral_frame(frame)));
    if (recent_.size() > kWindowFrames) recent_.pop_front();
    if (recent_.size() < kWindowFrames) return std::nullopt;

    const std::vector<LatentFrame> frames(recent_.begin(), recent_.end());
    const Window window(frames);
    PredictionFrame p;
    p.scores = rnn_forward(rnn_, window);
    const Classification c = classify(p.scores);
    p.label = c.label;
    p.confidence = c.confidence;
    p.end_time = window.end_time();
    return p;
  } catch (const Error& e) {
    throw Error(e.code(), e.detail() + " [stream frame " + std::to_string(frame.index) +
                              ", t=" + std::to_string(frame.start_time()) + " s]");
  }
}

void StreamInferencer::reset() { recent_.clear(); }

std::vector<PredictionFrame> infer_stream(const AEParams& ae, const RNNParams& rnn, FrameSource& source) {
  StreamInferencer inferencer(ae, rnn);
  std::vector<PredictionFrame> out;
  while (auto frame = source.next()) {
    if (auto p = inferencer.push(*frame)) out.push_back(*p);
  }
  return out;
}

std::optional<BreathEvent> Debouncer::push(const PredictionFrame& prediction) {
  if (last_end_ && !(prediction.end_time > *last_end_)) {
    throw Error(Errc::out_of_order_prediction,
                "prediction at " + std::to_string(prediction.end_time) + " s after " +
                    std::to_string(*last_end_) + " s");
  }
  last_end_ = prediction.end_time;

  const bool positive = is_breath(prediction.label) && prediction.confidence >= config_.confidence;
  if (!positive) {
    run_label_.reset();
    run_size_ = 0;
    return std::nullopt;
  }
  if (run_label_ != prediction.label) {
    run_label_ = prediction.label;
    run_size_ = 0;
    run_start_ = prediction.end_time;
    ++runs_;
  }
  ++run_size_;
  if (run_size_ != config_.run_length) return std::nullopt;

  const BreathEvent event{run_start_ - config_.window_seconds, prediction.label};
  auto& last = last_event_[index_of(event.kind)];
  if (last && event.time - *last < config_.refractory) return std::nullopt;
  last = event.time;
  return event;
}

std::vector<BreathEvent> debounce(std::span<const PredictionFrame> predictions, const DebounceConfig& config) {
  Debouncer d(config);
  std::vector<BreathEvent> out;
  for (const PredictionFrame& p : predictions) {
    if (auto e = d.push(p)) out.push_back(*e);
  }
  return out;
}

}  // namespace breath
