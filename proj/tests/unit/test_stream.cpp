#include <doctest.h>

#include <sstream>
#include <string>
#include <vector>

#include "breath/autoencoder.hpp"
#include "breath/error.hpp"
#include "breath/monitor.hpp"
#include "breath/rng.hpp"
#include "breath/rnn.hpp"
#include "breath/stream.hpp"

using namespace breath;

namespace {

AudioClip noise_clip(double seconds, std::uint64_t seed) {
  Rng rng(seed);
  AudioClip c;
  c.samples.resize(static_cast<std::size_t>(seconds * kSampleRate));
  for (float& s : c.samples) s = static_cast<float>(rng.uniform(-0.3, 0.3));
  return c;
}

PredictionFrame pred(double end, Label label, double confidence) {
  PredictionFrame p;
  p.end_time = end;
  p.label = label;
  p.confidence = confidence;
  return p;
}

// Frame i of a label sequence ends at 2 + i/8 s.
std::vector<PredictionFrame> sequence(const std::vector<std::pair<Label, double>>& items) {
  std::vector<PredictionFrame> out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    out.push_back(pred(2.0 + 0.125 * static_cast<double>(i), items[i].first, items[i].second));
  }
  return out;
}

std::vector<std::pair<Label, double>> repeat(Label l, double c, std::size_t n) { return {n, {l, c}}; }

template <typename T>
std::vector<T> cat(std::vector<T> a, const std::vector<T>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

std::string pcm_bytes(const AudioClip& clip) {
  std::string out;
  for (float s : clip.samples) {
    const auto v = static_cast<std::uint16_t>(amplitude_to_pcm(s));
    out += static_cast<char>(v & 0xff);
    out += static_cast<char>(v >> 8);
  }
  return out;
}

}  // namespace

TEST_CASE("frame sources") {
  const AudioClip clip = noise_clip(1.0, 1);  // 8 frames exactly
  SUBCASE("clip playback") {
    ClipFrameSource src(clip);
    std::size_t n = 0;
    while (auto f = src.next()) {
      REQUIRE(f->index == static_cast<std::int64_t>(n));
      REQUIRE(f->samples[5] == static_cast<double>(clip.samples[n * 1024 + 5]));
      ++n;
    }
    CHECK(n == 8);
  }
  SUBCASE("raw PCM matches clip playback after quantization") {
    std::istringstream in(pcm_bytes(clip) + "x");  // trailing odd byte is ignored
    PcmFrameSource src(in);
    std::size_t n = 0;
    while (auto f = src.next()) {
      for (std::size_t i = 0; i < 1024; ++i) {
        REQUIRE(f->samples[i] == static_cast<double>(pcm_to_amplitude(amplitude_to_pcm(clip.samples[n * 1024 + i]))));
      }
      ++n;
    }
    CHECK(n == 8);
  }
  SUBCASE("sample limit") {
    std::istringstream in(pcm_bytes(clip));
    PcmFrameSource src(in, 3000);
    CHECK(src.next().has_value());
    CHECK(src.next().has_value());
    CHECK_FALSE(src.next().has_value());
  }
}

TEST_CASE("sliding window inference") {
  const AEParams ae = init_ae(1);
  const RNNParams rnn = init_rnn(1);

  SUBCASE("2 s of audio yields one prediction") {
    const AudioClip c = noise_clip(2.0, 2);
    ClipFrameSource src(c);
    const auto p = infer_stream(ae, rnn, src);
    REQUIRE(p.size() == 1);
    CHECK(p[0].end_time == doctest::Approx(2.0));
    const ClassScores direct = rnn_forward(rnn, clip_window(ae, c));
    for (std::size_t k = 0; k < kNumClasses; ++k) CHECK(p[0].scores.values[k] == doctest::Approx(direct.values[k]).epsilon(1e-12));
  }
  SUBCASE("4 s yields 17 predictions with hop 1/8 s") {
    const AudioClip c = noise_clip(4.0, 3);
    ClipFrameSource src(c);
    const auto p = infer_stream(ae, rnn, src);
    REQUIRE(p.size() == 17);
    for (std::size_t i = 0; i < p.size(); ++i) CHECK(p[i].end_time == doctest::Approx(2.0 + 0.125 * i));
  }
  SUBCASE("stationary input gives identical predictions") {
    AudioClip c;
    c.samples.assign(5 * kSampleRate, 0.0f);
    ClipFrameSource src(c);
    const auto p = infer_stream(ae, rnn, src);
    REQUIRE(p.size() > 2);
    for (const PredictionFrame& q : p) CHECK(q.scores.values == p[0].scores.values);
  }
  SUBCASE("frames out of order") {
    StreamInferencer s(ae, rnn);
    TimeFrame f;
    f.index = 3;
    CHECK_FALSE(s.push(f).has_value());
    f.index = 5;
    try {
      (void)s.push(f);
      FAIL("gap accepted");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::out_of_order_prediction);
      CHECK(std::string(e.what()).find("stream frame 5") != std::string::npos);
    }
    s.reset();
    CHECK_NOTHROW(s.push(f));
  }
}

TEST_CASE("debounce examples") {
  SUBCASE("two confident frames are not enough") {
    const auto p = sequence(cat(repeat(Label::inhale, 0.995, 2), repeat(Label::unknown, 0.9, 5)));
    CHECK(debounce(p).empty());
  }
  SUBCASE("three confident frames give one event at the first window onset") {
    const auto p = sequence(cat(repeat(Label::unknown, 0.9, 4), repeat(Label::inhale, 0.995, 3)));
    const auto e = debounce(p);
    REQUIRE(e.size() == 1);
    CHECK(e[0].kind == Label::inhale);
    CHECK(e[0].time == doctest::Approx(0.5));
  }
  SUBCASE("a long run still gives one event") {
    CHECK(debounce(sequence(repeat(Label::exhale, 0.999, 8))).size() == 1);
  }
  SUBCASE("confidence exactly at the threshold counts") {
    CHECK(debounce(sequence(repeat(Label::exhale, 0.99, 3))).size() == 1);
    CHECK(debounce(sequence(repeat(Label::exhale, 0.9899, 3))).empty());
  }
  SUBCASE("unknown runs never emit") {
    CHECK(debounce(sequence(repeat(Label::unknown, 1.0, 20))).empty());
  }
  SUBCASE("a label change restarts the run") {
    const auto p = sequence(cat(repeat(Label::inhale, 0.995, 2), repeat(Label::exhale, 0.995, 2)));
    CHECK(debounce(p).empty());
  }
  SUBCASE("refractory period suppresses a quick repeat of the same kind") {
    auto items = cat(repeat(Label::inhale, 0.995, 3), repeat(Label::unknown, 0.5, 2));
    items = cat(items, repeat(Label::inhale, 0.995, 3));  // restarts 5 hops = 0.625 s later
    CHECK(debounce(sequence(items)).size() == 1);
    items = cat(items, repeat(Label::unknown, 0.5, 8));
    items = cat(items, repeat(Label::inhale, 0.995, 3));
    CHECK(debounce(sequence(items)).size() == 2);
  }
  SUBCASE("refractory is per kind") {
    auto items = cat(repeat(Label::inhale, 0.995, 3), repeat(Label::exhale, 0.995, 3));
    CHECK(debounce(sequence(items)).size() == 2);
  }
  SUBCASE("out of order predictions") {
    Debouncer d;
    (void)d.push(pred(3.0, Label::unknown, 0.5));
    CHECK_THROWS_AS(d.push(pred(3.0, Label::unknown, 0.5)), Error);
  }
}

TEST_CASE("debounce invariants on random streams") {
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<PredictionFrame> p;
    Label current = Label::unknown;
    for (std::size_t i = 0; i < 300; ++i) {
      if (rng.uniform() < 0.15) current = kAllLabels[rng.below(3)];
      const double conf = rng.uniform() < 0.7 ? rng.uniform(0.99, 1.0) : rng.uniform(0.3, 0.99);
      p.push_back(pred(2.0 + 0.125 * static_cast<double>(i), current, conf));
    }
    Debouncer d;
    std::vector<BreathEvent> events;
    for (const PredictionFrame& q : p) {
      if (auto e = d.push(q)) events.push_back(*e);
    }
    REQUIRE(events.size() <= d.runs_started());
    REQUIRE(d.runs_started() <= p.size());
    for (const BreathEvent& e : events) {
      REQUIRE(is_breath(e.kind));
      // Some prediction of that kind, at or above threshold, ends exactly one window after the event.
      bool found = false;
      for (const PredictionFrame& q : p) {
        if (q.label == e.kind && q.confidence >= 0.99 && std::abs(q.end_time - 2.0 - e.time) < 1e-9) found = true;
      }
      REQUIRE(found);
    }
    for (std::size_t i = 1; i < events.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        if (events[j].kind == events[i].kind) REQUIRE(events[i].time - events[j].time >= 1.0);
      }
    }
  }
}

TEST_CASE("monitor with a constant classifier") {
  const AEParams ae = init_ae(2);
  RNNParams rnn(8);
  rnn.b_y() << 12.0, -12.0, -12.0;  // always a confident inhale
  Monitor m(ae, rnn);
  CHECK(m.horizon_lag() == doctest::Approx(2.25));
  const AudioClip c = noise_clip(30.0, 4);
  ClipFrameSource src(c);
  const MonitorLog log = run_monitor(ae, rnn, src);
  CHECK(log.predictions.size() == 30 * 8 - 15);
  REQUIRE(log.events.size() == 1);
  CHECK(log.events[0].time == doctest::Approx(0.0));
  CHECK(log.alerts.empty());
  CHECK(m.series().size() == 0);

  MonitorConfig bad;
  bad.vigil.alpha = 0.7;
  CHECK_THROWS_AS(Monitor(ae, rnn, bad), Error);
}
