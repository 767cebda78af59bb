#include "breath/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "breath/error.hpp"
#include "breath/fft.hpp"
#include "breath/rng.hpp"

namespace breath {

namespace fs = std::filesystem;

namespace {

constexpr double kPeakMin = 0.2;
constexpr double kPeakMax = 0.8;

// Band edges (Hz) and tilt per breath kind. Exhales sit lower and lean toward
// the bottom of their band.
struct BurstShape {
  double low_hz, high_hz, tilt;
  double rise;  // fraction of the burst spent rising
  double min_duration, max_duration;
};

constexpr BurstShape kInhaleShape{300.0, 1500.0, 0.0, 0.45, 0.70, 0.95};
constexpr BurstShape kExhaleShape{100.0, 800.0, -0.5, 0.15, 0.80, 1.05};

const BurstShape& shape_of(Label kind) { return kind == Label::inhale ? kInhaleShape : kExhaleShape; }

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

double envelope(double u, double rise) {
  if (u <= 0.0 || u >= 1.0) return 0.0;
  if (u < rise) {
    const double s = std::sin(0.5 * std::numbers::pi * u / rise);
    return s * s;
  }
  const double c = std::cos(0.5 * std::numbers::pi * (u - rise) / (1.0 - rise));
  return c * c;
}

// Unit-peak breath burst of the given length in samples.
std::vector<double> burst(Label kind, std::size_t length, std::uint64_t seed) {
  const BurstShape& s = shape_of(kind);
  std::vector<double> x = band_noise(length, s.low_hz, s.high_hz, s.tilt, seed);
  double peak = 0.0;
  for (std::size_t i = 0; i < length; ++i) {
    x[i] *= envelope((static_cast<double>(i) + 0.5) / static_cast<double>(length), s.rise);
    peak = std::max(peak, std::abs(x[i]));
  }
  if (peak > 0.0) {
    for (double& v : x) v /= peak;
  }
  return x;
}

// Broadband room tone, 50 Hz - Nyquist, gently pink. Unit rms, generated in
// independent 2 s blocks so arbitrarily long streams stay cheap.
std::vector<double> ambience(std::size_t length, std::uint64_t seed) {
  std::vector<double> out;
  out.reserve(length);
  for (std::uint64_t block = 0; out.size() < length; ++block) {
    const std::vector<double> b =
        band_noise(kClipSamples, 50.0, kSampleRate / 2.0, -0.5, derive_seed(seed, {block}));
    const std::size_t take = std::min(b.size(), length - out.size());
    out.insert(out.end(), b.begin(), b.begin() + static_cast<std::ptrdiff_t>(take));
  }
  return out;
}

AudioClip to_clip(const std::vector<double>& x, std::optional<Label> label, double max_peak) {
  double peak = 0.0;
  for (double v : x) peak = std::max(peak, std::abs(v));
  const double scale = peak > max_peak ? max_peak / peak : 1.0;
  AudioClip clip;
  clip.label = label;
  clip.samples.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) clip.samples[i] = static_cast<float>(x[i] * scale);
  return clip;
}

void quantize(AudioClip& clip) {
  for (float& s : clip.samples) s = pcm_to_amplitude(amplitude_to_pcm(s));
}

void add_scaled(std::vector<double>& dst, const std::vector<double>& src, double gain, std::size_t at = 0) {
  for (std::size_t i = 0; i < src.size() && at + i < dst.size(); ++i) dst[at + i] += gain * src[i];
}

std::vector<double> burst(Label kind, std::size_t length, std::uint64_t seed);

// Adds a burst spanning [at, at + len) seconds, cropped to the buffer.
void place_burst(std::vector<double>& x, Label kind, double at, double len, double gain, std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(len * kSampleRate);
  std::vector<double> b = burst(kind, n, seed);
  if (at < 0.0) {
    const auto skip = std::min(n, static_cast<std::size_t>(-at * kSampleRate));
    b.erase(b.begin(), b.begin() + static_cast<std::ptrdiff_t>(skip));
    at = 0.0;
  }
  add_scaled(x, b, gain, static_cast<std::size_t>(at * kSampleRate));
}

}  // namespace

std::vector<double> band_noise(std::size_t length, double low_hz, double high_hz, double tilt,
                               std::uint64_t seed) {
  const std::size_t n = next_pow2(std::max<std::size_t>(length, 2));
  Rng rng(derive_seed(seed, {0xB4D}));
  std::vector<std::complex<double>> buf(n);
  for (auto& c : buf) c = {rng.normal(), 0.0};

  const FftPlan plan(n);
  plan.forward(buf);
  const double bin_hz = static_cast<double>(kSampleRate) / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t mirrored = k <= n / 2 ? k : n - k;
    const double f = static_cast<double>(mirrored) * bin_hz;
    const double gain = (f >= low_hz && f <= high_hz && f > 0.0) ? std::pow(f / low_hz, tilt) : 0.0;
    buf[k] *= gain;
  }
  plan.inverse(buf);

  std::vector<double> out(length);
  double sq = 0.0;
  for (std::size_t i = 0; i < length; ++i) {
    out[i] = buf[i].real();
    sq += out[i] * out[i];
  }
  const double rms = std::sqrt(sq / static_cast<double>(length));
  if (rms > 0.0) {
    for (double& v : out) v /= rms;
  }
  return out;
}

AudioClip gen_unknown(UnknownVariant variant, std::uint64_t seed) {
  Rng rng(derive_seed(seed, {0x0C}));
  std::vector<double> x = ambience(kClipSamples, derive_seed(seed, {0xF1}));
  switch (variant) {
    case UnknownVariant::near_silence: {
      const double rms = rng.uniform(0.002, 0.02);
      for (double& v : x) v *= rms;
      break;
    }
    case UnknownVariant::ambience: {
      // Slow loudness drift so the class is not perfectly stationary.
      const double depth = rng.uniform(0.0, 0.5);
      const double rate = rng.uniform(0.2, 1.5);
      const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
      double peak = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double t = static_cast<double>(i) / kSampleRate;
        x[i] *= 1.0 + depth * std::sin(2.0 * std::numbers::pi * rate * t + phase);
        peak = std::max(peak, std::abs(x[i]));
      }
      const double target = rng.uniform(kPeakMin, kPeakMax);
      for (double& v : x) v *= target / peak;
      break;
    }
    case UnknownVariant::click: {
      const double floor = rng.uniform(0.002, 0.02);
      for (double& v : x) v *= floor;
      const std::size_t clicks = 1 + rng.below(4);
      const double target = rng.uniform(kPeakMin, kPeakMax);
      for (std::size_t c = 0; c < clicks; ++c) {
        const auto len = static_cast<std::size_t>(rng.uniform(0.005, 0.015) * kSampleRate);
        const std::size_t at = rng.below(kClipSamples - len);
        const double tau = static_cast<double>(len) / 4.0;
        const double amp = target * rng.uniform(0.6, 1.0);
        for (std::size_t i = 0; i < len; ++i) {
          x[at + i] += amp * std::exp(-static_cast<double>(i) / tau) * rng.uniform(-1.0, 1.0);
        }
      }
      break;
    }
    case UnknownVariant::breath_gap: {
      const double floor = rng.uniform(0.001, 0.02);
      for (double& v : x) v *= floor;
      if (rng.uniform() < 0.8) {
        const double len = rng.uniform(kExhaleShape.min_duration, kExhaleShape.max_duration);
        const double end = rng.uniform(0.1, 0.6);
        place_burst(x, Label::exhale, end - len, len, rng.uniform(kPeakMin, kPeakMax), derive_seed(seed, {0xE1}));
      }
      if (rng.uniform() < 0.8) {
        const double len = rng.uniform(kInhaleShape.min_duration, kInhaleShape.max_duration);
        const double start = rng.uniform(1.4, 1.9);
        place_burst(x, Label::inhale, start, len, rng.uniform(kPeakMin, kPeakMax), derive_seed(seed, {0xE2}));
      }
      break;
    }
  }
  return to_clip(x, Label::unknown, kPeakMax);
}

AudioClip gen_clip(Label kind, std::uint64_t seed) {
  Rng rng(derive_seed(seed, {0xC1, index_of(kind)}));
  if (kind == Label::unknown) {
    const auto variant = static_cast<UnknownVariant>(rng.below(4));
    return gen_unknown(variant, derive_seed(seed, {0xC2}));
  }
  const BurstShape& s = shape_of(kind);
  const double duration = rng.uniform(s.min_duration, s.max_duration);
  const double center = 1.0 + rng.uniform(-0.15, 0.15);
  const double peak = rng.uniform(kPeakMin, kPeakMax);
  const double floor = rng.uniform(0.001, 0.02);

  std::vector<double> x = ambience(kClipSamples, derive_seed(seed, {0xF2}));
  for (double& v : x) v *= floor;
  const double start = center - duration / 2.0;
  const double end = center + duration / 2.0;
  const auto place = [&](Label k, double at, double len, double gain, std::uint64_t tag) {
    place_burst(x, k, at, len, gain, derive_seed(seed, {tag}));
  };
  place(kind, start, duration, peak, 0xB1);

  // Most clips also carry the edges of the neighbouring breath phases, as a
  // window cut from continuous breathing would.
  if (rng.uniform() < 0.75) {
    const Label other = kind == Label::inhale ? Label::exhale : Label::inhale;
    const BurstShape& o = shape_of(other);
    const double gap = rng.uniform(0.15, 0.30);
    const double pause = rng.uniform(0.2, 1.2);
    const double before_len = rng.uniform(o.min_duration, o.max_duration);
    const double after_len = rng.uniform(o.min_duration, o.max_duration);
    const double lead = kind == Label::inhale ? pause : gap;
    const double trail = kind == Label::inhale ? gap : pause;
    place(other, start - lead - before_len, before_len, rng.uniform(kPeakMin, kPeakMax), 0xB2);
    place(other, end + trail, after_len, rng.uniform(kPeakMin, kPeakMax), 0xB3);
  }
  return to_clip(x, kind, kPeakMax);
}

Corpus synth_corpus(std::size_t n_per_class, std::uint64_t seed) {
  if (n_per_class < 10) {
    throw Error(Errc::domain_error, "n_per_class must be at least 10, got " + std::to_string(n_per_class));
  }
  Corpus corpus;
  for (Label label : kAllLabels) {
    for (std::size_t i = 0; i < n_per_class; ++i) {
      AudioClip clip = gen_clip(label, derive_seed(seed, {index_of(label), i}));
      quantize(clip);
      std::ostringstream name;
      name << to_string(label) << '/' << to_string(label) << '_' << std::setw(4) << std::setfill('0') << i
           << ".wav";
      corpus.add({std::move(clip), label, name.str()});
    }
  }
  return corpus;
}

Corpus gen_corpus(std::size_t n_per_class, std::uint64_t seed, const fs::path& out_dir) {
  Corpus corpus = synth_corpus(n_per_class, seed);
  std::error_code ec;
  for (Label label : kAllLabels) {
    fs::create_directories(out_dir / std::string(to_string(label)), ec);
    if (ec) throw Error(Errc::io_error, "cannot create " + (out_dir / std::string(to_string(label))).string());
  }
  for (const CorpusClip& c : corpus.clips) save_wav(out_dir / c.id, c.clip);
  return corpus;
}

std::string_view to_string(ScenarioKind kind) noexcept {
  switch (kind) {
    case ScenarioKind::normal: return "normal";
    case ScenarioKind::arrest: return "arrest";
    case ScenarioKind::decrement: return "decrement";
  }
  return "normal";
}

std::optional<ScenarioKind> parse_scenario_kind(std::string_view text) noexcept {
  for (ScenarioKind k : {ScenarioKind::normal, ScenarioKind::arrest, ScenarioKind::decrement}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

void ScenarioSpec::validate() const {
  if (!(base_period >= 1.0)) throw Error(Errc::domain_error, "base_period must be >= 1.0 s");
  if (!(duration > 0.0)) throw Error(Errc::domain_error, "duration must be positive");
  if (kind != ScenarioKind::normal && !(onset < duration)) throw Error(Errc::domain_error, "onset must precede the end of the scenario");
  if (!(decrement_rate >= 0.0 && decrement_rate <= 0.2)) {
    throw Error(Errc::domain_error, "decrement_rate must lie in [0, 0.2]");
  }
  if (!(jitter_sd >= 0.0)) throw Error(Errc::domain_error, "jitter_sd must be non-negative");
  if (!(noise_floor >= 0.0 && noise_floor < 0.5)) throw Error(Errc::domain_error, "noise_floor out of range");
}

Scenario gen_scenario(const ScenarioSpec& spec) {
  spec.validate();
  const auto total = static_cast<std::size_t>(std::llround(spec.duration * kSampleRate));
  Scenario sc;
  // Uniform noise of amplitude a has rms a / sqrt(3); the floor matches that power.
  sc.floor_rms = spec.noise_floor / std::sqrt(3.0);
  std::vector<double> x = ambience(total, derive_seed(spec.seed, {0x5F}));
  for (double& v : x) v *= sc.floor_rms;

  Rng rng(derive_seed(spec.seed, {0x5C}));
  const double scale = std::min(1.0, spec.base_period / 2.5);
  const bool decrementing = spec.kind == ScenarioKind::decrement;
  // After the decrement onset jitter is bounded tightly enough that successive
  // gaps keep growing.
  const double late_jitter = 0.2 * spec.decrement_rate * spec.base_period;

  double nominal = 0.5;
  double period = spec.base_period;
  for (std::uint64_t cycle = 0;; ++cycle) {
    const bool late = decrementing && nominal >= spec.onset;
    const double bound = late ? late_jitter : 3.0 * spec.jitter_sd;
    const double jitter = std::clamp(spec.jitter_sd * rng.normal(), -bound, bound);
    const double inhale_at = std::max(0.0, nominal + jitter);
    const double inhale_len = rng.uniform(kInhaleShape.min_duration, kInhaleShape.max_duration) * scale;
    const double gap = rng.uniform(0.15, 0.30) * scale;
    const double exhale_len = rng.uniform(kExhaleShape.min_duration, kExhaleShape.max_duration) * scale;
    const double exhale_at = inhale_at + inhale_len + gap;
    const double inhale_peak = rng.uniform(kPeakMin, kPeakMax);
    const double exhale_peak = rng.uniform(kPeakMin, kPeakMax);

    if (exhale_at + exhale_len > spec.duration) break;
    if (spec.kind == ScenarioKind::arrest && exhale_at >= spec.onset) break;

    const auto put = [&](Label kind, double at, double len, double peak, std::uint64_t tag) {
      const auto n = static_cast<std::size_t>(len * kSampleRate);
      add_scaled(x, burst(kind, n, derive_seed(spec.seed, {cycle, tag})), peak,
                 static_cast<std::size_t>(at * kSampleRate));
      sc.truth.onsets.push_back({at, kind});
    };
    put(Label::inhale, inhale_at, inhale_len, inhale_peak, 1);
    put(Label::exhale, exhale_at, exhale_len, exhale_peak, 2);

    if (decrementing && nominal >= spec.onset) period *= 1.0 + spec.decrement_rate;
    nominal += period;
  }

  sc.audio = to_clip(x, std::nullopt, 1.0);
  quantize(sc.audio);
  return sc;
}

void write_ground_truth(std::ostream& out, const GroundTruth& truth) {
  out << "time_s,kind\n";
  out << std::fixed << std::setprecision(4);
  for (const BreathOnset& o : truth.onsets) out << o.time << ',' << to_string(o.kind) << '\n';
}

void save_ground_truth(const fs::path& path, const GroundTruth& truth) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(Errc::io_error, "cannot write " + path.string());
  write_ground_truth(out, truth);
}

}  // namespace breath
