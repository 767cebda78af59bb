#include "breath/corpus.hpp"

#include <algorithm>
#include <cstring>
#include <numeric>

#include "breath/error.hpp"
#include "breath/rng.hpp"

namespace breath {

namespace fs = std::filesystem;

void Corpus::add(CorpusClip clip) {
  ++class_counts[index_of(clip.label)];
  clips.push_back(std::move(clip));
}

CorpusLoad load_corpus(const fs::path& root) {
  CorpusLoad out;
  for (Label label : kAllLabels) {
    const fs::path dir = root / std::string(to_string(label));
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) {
      throw Error(Errc::empty_class, "missing class directory " + dir.string());
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".wav") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());

    std::size_t loaded = 0;
    for (const fs::path& file : files) {
      try {
        AudioClip clip = load_wav(file);
        if (clip.samples.size() != kClipSamples) {
          throw Error(Errc::unsupported_format, "clip has " + std::to_string(clip.samples.size()) +
                                                    " samples (expected " +
                                                    std::to_string(kClipSamples) + ")");
        }
        clip.label = label;
        out.corpus.add({std::move(clip), label, fs::relative(file, root).generic_string()});
        ++loaded;
      } catch (const Error& e) {
        out.errors.push_back({file, e.what()});
      }
    }
    if (loaded == 0) {
      throw Error(Errc::empty_class, "no valid clips in " + dir.string());
    }
  }
  return out;
}

std::uint64_t corpus_fingerprint(const Corpus& corpus) {
  std::vector<std::uint64_t> digests;
  digests.reserve(corpus.clips.size());
  for (const CorpusClip& c : corpus.clips) {
    std::uint64_t h = 0x6A09E667F3BCC908ULL;
    for (char ch : c.id) h = splitmix64(h ^ static_cast<unsigned char>(ch));
    for (float s : c.clip.samples) {
      std::uint32_t bits;
      std::memcpy(&bits, &s, sizeof bits);
      h = splitmix64(h ^ bits);
    }
    digests.push_back(h);
  }
  std::sort(digests.begin(), digests.end());
  std::uint64_t h = digests.size();
  for (std::uint64_t d : digests) h = splitmix64(h ^ d);
  return h;
}

namespace {

std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

}  // namespace

SplitPlan::SplitPlan(std::size_t corpus_size, std::uint64_t seed)
    : corpus_size_(corpus_size), seed_(seed) {
  if (corpus_size < kMinSplitCorpus) {
    throw Error(Errc::corpus_too_small, std::to_string(corpus_size) + " clips (need at least " +
                                            std::to_string(kMinSplitCorpus) + ")");
  }
  // 1500 clips -> 50 test, 50 validation, 300 training per epoch.
  const std::size_t test_count = ceil_div(corpus_size, 30);
  validation_count_ = ceil_div(corpus_size, 30);
  training_count_ = corpus_size / 5;

  std::vector<std::size_t> all(corpus_size);
  std::iota(all.begin(), all.end(), std::size_t{0});
  Rng rng(derive_seed(seed, {0x7E57}));
  rng.shuffle(std::span(all));
  test_.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(test_count));
  pool_.assign(all.begin() + static_cast<std::ptrdiff_t>(test_count), all.end());
  std::sort(test_.begin(), test_.end());
  std::sort(pool_.begin(), pool_.end());
}

EpochDraw SplitPlan::draw(std::size_t epoch) const {
  std::vector<std::size_t> shuffled = pool_;
  Rng rng(derive_seed(seed_, {0xE90C, epoch}));
  rng.shuffle(std::span(shuffled));
  EpochDraw d;
  const auto v_end = shuffled.begin() + static_cast<std::ptrdiff_t>(validation_count_);
  d.validation.assign(shuffled.begin(), v_end);
  d.training.assign(v_end, v_end + static_cast<std::ptrdiff_t>(training_count_));
  return d;
}

SplitPlan make_split(const Corpus& corpus, std::uint64_t seed) { return SplitPlan(corpus.size(), seed); }

double draw_noise_amplitude(std::uint64_t seed) {
  Rng rng(derive_seed(seed, {0xA0}));
  return rng.uniform(kNoiseMinAmplitude, kNoiseMaxAmplitude);
}

AudioClip add_uniform_noise(const AudioClip& clip, double amplitude, std::uint64_t seed) {
  AudioClip out = clip;
  if (amplitude == 0.0) return out;
  Rng rng(derive_seed(seed, {0xA1}));
  for (float& s : out.samples) {
    const double noisy = static_cast<double>(s) + rng.uniform(-amplitude, amplitude);
    s = static_cast<float>(std::clamp(noisy, -1.0, 1.0));
  }
  return out;
}

AudioClip augment_noise(const AudioClip& clip, std::uint64_t seed) {
  return add_uniform_noise(clip, draw_noise_amplitude(seed), seed);
}

}  // namespace breath
