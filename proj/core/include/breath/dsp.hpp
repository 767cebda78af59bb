#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "breath/labels.hpp"

namespace breath {

inline constexpr int kSampleRate = 8192;
inline constexpr std::size_t kFrameLength = 1024;        // 1/8 s
inline constexpr std::size_t kClipSamples = 16384;       // 2 s
inline constexpr std::size_t kFramesPerClip = kClipSamples / kFrameLength;
inline constexpr double kFrameSeconds = 0.125;
inline constexpr double kMaxMagnitude = 1024.0;  // |X[k]| bound for unit-amplitude input

// Mono audio at kSampleRate; samples lie in [-1, 1].
struct AudioClip {
  std::vector<float> samples;
  std::optional<Label> label;

  static constexpr int sample_rate = kSampleRate;

  double duration() const noexcept {
    return static_cast<double>(samples.size()) / static_cast<double>(kSampleRate);
  }
};

struct TimeFrame {
  std::array<double, kFrameLength> samples{};
  std::int64_t index = 0;  // position in the stream, in frames

  double start_time() const noexcept { return static_cast<double>(index) * kFrameSeconds; }
};

using Magnitudes = std::array<double, kFrameLength>;

struct SpectralFrame {
  Magnitudes values{};  // normalized to [0, 1]
  std::int64_t index = 0;

  double start_time() const noexcept { return static_cast<double>(index) * kFrameSeconds; }
};

struct FramedSignal {
  std::vector<TimeFrame> frames;
  std::size_t dropped_samples = 0;  // trailing remainder shorter than one frame
};

// WAV I/O. Only RIFF/WAVE PCM, 16-bit, mono, 8192 Hz is accepted.
AudioClip load_wav(const std::filesystem::path& path);
AudioClip read_wav(std::istream& in);
// Validates the header and leaves `in` at the first sample of the data chunk.
// Returns the number of samples the data chunk declares.
std::size_t read_wav_header(std::istream& in);
void save_wav(const std::filesystem::path& path, const AudioClip& clip);
void write_wav(std::ostream& out, const AudioClip& clip);

// 16-bit PCM conversions (scale 1/32768).
float pcm_to_amplitude(std::int16_t value) noexcept;
std::int16_t amplitude_to_pcm(double amplitude) noexcept;

FramedSignal frame_signal(const AudioClip& clip);

Magnitudes dfft_magnitude(const TimeFrame& frame);

SpectralFrame normalize_spectrum(const Magnitudes& raw, std::int64_t index = 0);

// frame_signal -> dfft_magnitude -> normalize_spectrum for a whole clip.
std::vector<SpectralFrame> spectral_frames(const AudioClip& clip);
SpectralFrame spectral_frame(const TimeFrame& frame);

}  // namespace breath
