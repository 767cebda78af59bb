#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include "breath/dsp.hpp"
#include "breath/error.hpp"
#include "breath/fft.hpp"

namespace breath {
namespace {

const FftPlan& frame_plan() {
  static const FftPlan plan(kFrameLength);
  return plan;
}

}  // namespace

FramedSignal frame_signal(const AudioClip& clip) {
  if (clip.samples.size() < kFrameLength) {
    throw Error(Errc::empty_clip, std::to_string(clip.samples.size()) + " samples, need at least " +
                                      std::to_string(kFrameLength));
  }
  FramedSignal out;
  const std::size_t count = clip.samples.size() / kFrameLength;
  out.dropped_samples = clip.samples.size() % kFrameLength;
  out.frames.resize(count);
  for (std::size_t f = 0; f < count; ++f) {
    TimeFrame& frame = out.frames[f];
    frame.index = static_cast<std::int64_t>(f);
    std::copy_n(clip.samples.begin() + static_cast<std::ptrdiff_t>(f * kFrameLength), kFrameLength,
                frame.samples.begin());
  }
  return out;
}

Magnitudes dfft_magnitude(const TimeFrame& frame) {
  std::array<std::complex<double>, kFrameLength> buffer;
  std::transform(frame.samples.begin(), frame.samples.end(), buffer.begin(),
                 [](double x) { return std::complex<double>(x, 0.0); });
  frame_plan().forward(buffer);
  Magnitudes out;
  std::transform(buffer.begin(), buffer.end(), out.begin(),
                 [](const std::complex<double>& c) { return std::abs(c); });
  return out;
}

SpectralFrame normalize_spectrum(const Magnitudes& raw, std::int64_t index) {
  static const double divisor = std::log1p(kMaxMagnitude);
  SpectralFrame out;
  out.index = index;
  for (std::size_t k = 0; k < kFrameLength; ++k) {
    const double v = raw[k];
    if (!(v >= 0.0)) {
      throw Error(Errc::negative_magnitude, "bin " + std::to_string(k) + " = " + std::to_string(v));
    }
    out.values[k] = std::clamp(std::log1p(v) / divisor, 0.0, 1.0);
  }
  return out;
}

SpectralFrame spectral_frame(const TimeFrame& frame) {
  return normalize_spectrum(dfft_magnitude(frame), frame.index);
}

std::vector<SpectralFrame> spectral_frames(const AudioClip& clip) {
  const FramedSignal framed = frame_signal(clip);
  std::vector<SpectralFrame> out;
  out.reserve(framed.frames.size());
  for (const TimeFrame& f : framed.frames) out.push_back(spectral_frame(f));
  return out;
}

}  // namespace breath
