#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <vector>

#include "breath/dsp.hpp"
#include "breath/error.hpp"
#include "breath/fft.hpp"
#include "breath/synthgen.hpp"

using namespace breath;

namespace {

double rms(std::span<const float> x) {
  double s = 0.0;
  for (float v : x) s += static_cast<double>(v) * v;
  return x.empty() ? 0.0 : std::sqrt(s / static_cast<double>(x.size()));
}

double peak(const AudioClip& c) {
  double p = 0.0;
  for (float v : c.samples) p = std::max(p, static_cast<double>(std::abs(v)));
  return p;
}

// Power-weighted mean frequency over every frame of the clip.
double centroid_hz(const AudioClip& c) {
  double num = 0.0, den = 0.0;
  for (const TimeFrame& f : frame_signal(c).frames) {
    const Magnitudes m = dfft_magnitude(f);
    for (std::size_t k = 1; k <= kFrameLength / 2; ++k) {
      const double p = m[k] * m[k];
      num += p * static_cast<double>(k) * kSampleRate / kFrameLength;
      den += p;
    }
  }
  return num / den;
}

std::vector<double> inhale_times(const GroundTruth& t) {
  std::vector<double> out;
  for (const BreathOnset& o : t.onsets) {
    if (o.kind == Label::inhale) out.push_back(o.time);
  }
  return out;
}

}  // namespace

TEST_CASE("clips are 2 s, labeled and within the amplitude limits") {
  for (Label l : kAllLabels) {
    for (std::uint64_t s = 0; s < 20; ++s) {
      const AudioClip c = gen_clip(l, s);
      REQUIRE(c.samples.size() == 16384);
      REQUIRE(c.label == l);
      REQUIRE(peak(c) <= 0.8 + 1e-6);
      if (is_breath(l)) REQUIRE(peak(c) >= 0.2 - 1e-6);
    }
  }
}

TEST_CASE("generators are pure functions of the seed") {
  CHECK(gen_clip(Label::inhale, 5).samples == gen_clip(Label::inhale, 5).samples);
  CHECK(gen_clip(Label::inhale, 5).samples != gen_clip(Label::inhale, 6).samples);
  CHECK(band_noise(3000, 100, 800, 0, 2) == band_noise(3000, 100, 800, 0, 2));
  const Corpus a = synth_corpus(10, 3), b = synth_corpus(10, 3);
  CHECK(corpus_fingerprint(a) == corpus_fingerprint(b));
  CHECK(a.size() == 30);
  CHECK(a.clips[0].id == "inhale/inhale_0000.wav");
  CHECK_THROWS_AS(synth_corpus(9, 3), Error);
}

TEST_CASE("exhales sit lower in frequency than inhales") {
  double inhale = 0.0, exhale = 0.0;
  for (std::uint64_t s = 0; s < 30; ++s) {
    inhale += centroid_hz(gen_clip(Label::inhale, s));
    exhale += centroid_hz(gen_clip(Label::exhale, s));
  }
  CHECK(exhale < inhale);
}

TEST_CASE("unknown variants") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const AudioClip quiet = gen_unknown(UnknownVariant::near_silence, s);
    CHECK(quiet.samples.size() == 16384);
    CHECK(rms(quiet.samples) < 0.05);
    CHECK(gen_unknown(UnknownVariant::ambience, s).label == Label::unknown);
    CHECK(peak(gen_unknown(UnknownVariant::click, s)) > 0.0);
    const AudioClip gap = gen_unknown(UnknownVariant::breath_gap, s);
    // The middle of a gap clip is quiet.
    CHECK(rms(std::span<const float>(gap.samples).subspan(6000, 4000)) < 0.05);
  }
}

TEST_CASE("band noise") {
  const std::vector<double> x = band_noise(8192, 300.0, 1500.0, 0.0, 4);
  REQUIRE(x.size() == 8192);
  double power = 0.0;
  for (double v : x) power += v * v;
  CHECK(std::sqrt(power / 8192.0) == doctest::Approx(1.0).epsilon(1e-6));

  std::vector<std::complex<double>> buf(x.begin(), x.end());
  FftPlan(8192).forward(buf);
  double inside = 0.0, total = 0.0;
  for (std::size_t k = 1; k < 4096; ++k) {
    const double hz = static_cast<double>(k);  // 1 Hz bins
    const double p = std::norm(buf[k]);
    total += p;
    if (hz >= 300.0 && hz <= 1500.0) inside += p;
  }
  CHECK(inside / total > 0.99);
}

TEST_CASE("scenario validation") {
  ScenarioSpec s;
  s.base_period = 0.9;
  CHECK_THROWS_AS(s.validate(), Error);
  s = {};
  s.kind = ScenarioKind::arrest;
  s.onset = s.duration;
  CHECK_THROWS_AS(s.validate(), Error);
  s.kind = ScenarioKind::normal;
  CHECK_NOTHROW(s.validate());
  s = {};
  s.decrement_rate = 0.3;
  CHECK_THROWS_AS(s.validate(), Error);
  s = {};
  s.jitter_sd = -0.1;
  CHECK_THROWS_AS(s.validate(), Error);
  s = {};
  s.noise_floor = 0.5;
  CHECK_THROWS_AS(s.validate(), Error);
  CHECK_NOTHROW(ScenarioSpec{}.validate());
  CHECK(parse_scenario_kind("arrest") == ScenarioKind::arrest);
  CHECK_FALSE(parse_scenario_kind("apnea").has_value());
}

TEST_CASE("normal scenario") {
  ScenarioSpec spec;
  spec.duration = 300.0;
  spec.seed = 12;
  const Scenario sc = gen_scenario(spec);
  CHECK(sc.audio.samples.size() == 300u * 8192u);
  CHECK(sc.floor_rms == doctest::Approx(0.02 / std::sqrt(3.0)));
  CHECK(peak(sc.audio) <= 1.0);

  const auto& on = sc.truth.onsets;
  REQUIRE_FALSE(on.empty());
  CHECK(on.front().kind == Label::inhale);
  for (std::size_t i = 1; i < on.size(); ++i) {
    REQUIRE(on[i].time > on[i - 1].time);
    REQUIRE(on[i].kind != on[i - 1].kind);
  }
  const std::size_t cycles = inhale_times(sc.truth).size();
  CHECK(cycles >= 115);
  CHECK(cycles <= 125);

  // Every onset stands well above the background floor.
  for (const BreathOnset& o : on) {
    const auto at = static_cast<std::size_t>(o.time * kSampleRate);
    const std::span<const float> half_second(sc.audio.samples.data() + at, 4096);
    REQUIRE(rms(half_second) > 3.0 * sc.floor_rms);
  }

  CHECK(gen_scenario(spec).audio.samples == sc.audio.samples);
}

TEST_CASE("arrest scenario stops breathing before the onset") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    ScenarioSpec spec;
    spec.kind = ScenarioKind::arrest;
    spec.seed = seed;
    const Scenario sc = gen_scenario(spec);
    REQUIRE_FALSE(sc.truth.onsets.empty());
    CHECK(sc.truth.onsets.back().time < 60.0);
    CHECK(sc.truth.onsets.back().time > 50.0);
    CHECK(sc.audio.samples.size() == 120u * 8192u);
  }
}

TEST_CASE("decrement scenario lengthens every interval after the onset") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    ScenarioSpec spec;
    spec.kind = ScenarioKind::decrement;
    spec.seed = seed;
    spec.duration = 180.0;
    const std::vector<double> in = inhale_times(gen_scenario(spec).truth);
    std::vector<double> late;
    for (double t : in) {
      if (t > spec.onset + 0.5) late.push_back(t);
    }
    REQUIRE(late.size() >= 5);
    for (std::size_t i = 2; i < late.size(); ++i) {
      REQUIRE(late[i] - late[i - 1] > late[i - 1] - late[i - 2]);
    }
  }
}

TEST_CASE("ground truth CSV") {
  GroundTruth t;
  t.onsets = {{0.5, Label::inhale}, {1.75, Label::exhale}};
  std::ostringstream out;
  write_ground_truth(out, t);
  CHECK(out.str() == "time_s,kind\n0.5000,inhale\n1.7500,exhale\n");
}
