#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "breath/dsp.hpp"
#include "breath/labels.hpp"

namespace breath {

struct CorpusClip {
  AudioClip clip;  // clip.label is always set
  Label label = Label::unknown;
  std::string id;  // relative path, e.g. "inhale/clip_0003.wav"
};

struct Corpus {
  std::vector<CorpusClip> clips;
  std::array<std::size_t, kNumClasses> class_counts{};

  std::size_t size() const noexcept { return clips.size(); }
  void add(CorpusClip clip);
};

struct LoadIssue {
  std::filesystem::path path;
  std::string message;
};

struct CorpusLoad {
  Corpus corpus;
  std::vector<LoadIssue> errors;  // files that failed to load; the rest are kept
};

// Loads root/{inhale,exhale,unknown}/*.wav in sorted order. Throws
// Errc::empty_class when a class directory is missing or yields no clip.
CorpusLoad load_corpus(const std::filesystem::path& root);

// Order-independent digest of clip ids and sample data.
std::uint64_t corpus_fingerprint(const Corpus& corpus);

struct EpochDraw {
  std::vector<std::size_t> validation;  // corpus indices
  std::vector<std::size_t> training;
};

// Fixed test set plus per-epoch validation/training draws from the remaining
// pool. Every draw is a pure function of (seed, epoch).
class SplitPlan {
 public:
  SplitPlan(std::size_t corpus_size, std::uint64_t seed);

  const std::vector<std::size_t>& test_ids() const noexcept { return test_; }
  const std::vector<std::size_t>& pool() const noexcept { return pool_; }
  std::size_t validation_count() const noexcept { return validation_count_; }
  std::size_t training_count() const noexcept { return training_count_; }
  std::size_t corpus_size() const noexcept { return corpus_size_; }

  EpochDraw draw(std::size_t epoch) const;

 private:
  std::size_t corpus_size_;
  std::uint64_t seed_;
  std::vector<std::size_t> test_;
  std::vector<std::size_t> pool_;
  std::size_t validation_count_;
  std::size_t training_count_;
};

inline constexpr std::size_t kMinSplitCorpus = 400;

// Throws Errc::corpus_too_small below kMinSplitCorpus clips.
SplitPlan make_split(const Corpus& corpus, std::uint64_t seed);

inline constexpr double kNoiseMinAmplitude = 0.005;
inline constexpr double kNoiseMaxAmplitude = 0.05;

// Amplitude drawn for augment_noise(clip, seed).
double draw_noise_amplitude(std::uint64_t seed);

// Adds i.i.d. uniform noise in [-amplitude, amplitude] per sample, clamped to [-1, 1].
AudioClip add_uniform_noise(const AudioClip& clip, double amplitude, std::uint64_t seed);

// add_uniform_noise with amplitude ~ U[0.005, 0.05].
AudioClip augment_noise(const AudioClip& clip, std::uint64_t seed);

}  // namespace breath
