#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "breath/corpus.hpp"
#include "breath/dsp.hpp"
#include "breath/labels.hpp"

namespace breath {

// Synthetic stand-in for recorded breath sounds. Every generator is a pure
// function of its seed.

// breath_gap is the quiet stretch between two breaths: near-silence in the
// middle with the tail of an exhale and the head of an inhale at the edges.
enum class UnknownVariant { near_silence, ambience, click, breath_gap };

AudioClip gen_clip(Label kind, std::uint64_t seed);
AudioClip gen_unknown(UnknownVariant variant, std::uint64_t seed);

// Gaussian noise restricted to [low_hz, high_hz] by FFT masking, with a
// power-law spectral tilt (amplitude ~ f^tilt), scaled to unit rms.
std::vector<double> band_noise(std::size_t length, double low_hz, double high_hz, double tilt,
                               std::uint64_t seed);

// In-memory corpus, samples already quantized to 16-bit so that it matches
// what load_corpus returns for the files written by gen_corpus.
Corpus synth_corpus(std::size_t n_per_class, std::uint64_t seed);

// Writes root/{inhale,exhale,unknown}/<kind>_NNNN.wav. Throws Errc::io_error.
Corpus gen_corpus(std::size_t n_per_class, std::uint64_t seed, const std::filesystem::path& out_dir);

enum class ScenarioKind { normal, arrest, decrement };

std::string_view to_string(ScenarioKind kind) noexcept;
std::optional<ScenarioKind> parse_scenario_kind(std::string_view text) noexcept;

struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::normal;
  double duration = 120.0;
  double base_period = 2.5;
  double jitter_sd = 0.1;
  double onset = 60.0;
  double decrement_rate = 0.04;
  double noise_floor = 0.02;
  std::uint64_t seed = 1;

  // Throws Errc::domain_error on violated invariants.
  void validate() const;
};

struct BreathOnset {
  double time = 0.0;
  Label kind = Label::inhale;
};

struct GroundTruth {
  std::vector<BreathOnset> onsets;  // strictly increasing, inhale/exhale alternating
};

struct Scenario {
  AudioClip audio;
  GroundTruth truth;
  double floor_rms = 0.0;
};

Scenario gen_scenario(const ScenarioSpec& spec);

// "time_s,kind" header followed by one row per onset.
void write_ground_truth(std::ostream& out, const GroundTruth& truth);
void save_ground_truth(const std::filesystem::path& path, const GroundTruth& truth);

}  // namespace breath
