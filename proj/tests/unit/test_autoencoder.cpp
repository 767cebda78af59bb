#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "breath/autoencoder.hpp"
#include "breath/error.hpp"
#include "breath/optim.hpp"
#include "breath/rng.hpp"
#include "oracles.hpp"

using namespace breath;

namespace {

SpectralFrame random_frame(std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
  Rng rng(seed);
  SpectralFrame f;
  for (double& v : f.values) v = rng.uniform(lo, hi);
  return f;
}

AEParams random_params(std::uint64_t seed, double scale) {
  AEParams p;
  Rng rng(seed);
  for (double& v : p.data()) v = rng.uniform(-scale, scale);
  return p;
}

Eigen::MatrixXd as_row(const SpectralFrame& f) {
  Eigen::MatrixXd m(1, kFrameLength);
  for (std::size_t i = 0; i < kFrameLength; ++i) m(0, static_cast<Eigen::Index>(i)) = f.values[i];
  return m;
}

// A spread of coordinates touching every tensor, weights and biases alike.
std::vector<std::size_t> sampled_indices(const AEParams& p, std::uint64_t seed, std::size_t per_tensor) {
  Rng rng(seed);
  std::vector<std::size_t> idx;
  for (std::size_t l = 0; l < kAeLayers; ++l) {
    const std::size_t wn = kAeDims[l] * kAeDims[l + 1];
    for (std::size_t k = 0; k < per_tensor; ++k) idx.push_back(p.weight_offset(l) + rng.below(wn));
    for (std::size_t k = 0; k < per_tensor / 2; ++k) idx.push_back(p.bias_offset(l) + rng.below(kAeDims[l + 1]));
  }
  return idx;
}

}  // namespace

TEST_CASE("layout and shapes") {
  const AEParams p;
  std::size_t expected = 0;
  for (std::size_t l = 0; l < kAeLayers; ++l) expected += kAeDims[l] * kAeDims[l + 1] + kAeDims[l + 1];
  CHECK(AEParams::parameter_count() == expected);
  CHECK(p.data().size() == expected);
  CHECK(p.weight(0).rows() == 1024);
  CHECK(p.weight(0).cols() == 256);
  CHECK(p.weight(1).cols() == 50);
  CHECK(p.weight(3).cols() == 1024);
}

TEST_CASE("initialization") {
  const AEParams a = init_ae(11);
  CHECK(a == init_ae(11));
  CHECK_FALSE(a == init_ae(12));
  for (std::size_t l = 0; l < kAeLayers; ++l) {
    const double limit = std::sqrt(6.0 / static_cast<double>(kAeDims[l] + kAeDims[l + 1]));
    const auto w = a.weight(l);
    CHECK(w.maxCoeff() <= limit);
    CHECK(w.minCoeff() >= -limit);
    CHECK(w.maxCoeff() > 0.9 * limit);
    CHECK(a.bias(l).isZero(0.0));
  }
  CHECK(std::abs(a.weight(0).mean()) < 0.01);
}

TEST_CASE("encoder output") {
  SUBCASE("zero weights give a zero code") {
    const LatentFrame z = encode(AEParams{}, random_frame(1));
    for (double v : z.code) CHECK(v == 0.0);
  }
  SUBCASE("deterministic, timestamp carried, inside (-1, 1)") {
    const AEParams p = init_ae(3);
    SpectralFrame f = random_frame(2);
    f.index = 42;
    const LatentFrame a = encode(p, f);
    const LatentFrame b = encode(p, f);
    CHECK(a.code == b.code);
    CHECK(a.index == 42);
    CHECK(a.start_time() == doctest::Approx(42 * 0.125));
    for (double v : a.code) CHECK((v > -1.0 && v < 1.0));
  }
  SUBCASE("matches the per-neuron oracle") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const AEParams p = random_params(seed, 0.08);
      const SpectralFrame f = random_frame(seed + 50);
      const auto acts = oracle::ae_activations(p, f.values);
      const LatentFrame z = encode(p, f);
      for (std::size_t i = 0; i < kLatentSize; ++i) REQUIRE(std::abs(z.code[i] - acts[2][i]) <= 1e-6);
      const Reconstruction r = reconstruct(p, f);
      double mse = 0.0;
      for (std::size_t i = 0; i < kFrameLength; ++i) {
        REQUIRE(std::abs(r.values[i] - acts[4][i]) <= 1e-6);
        mse += (acts[4][i] - f.values[i]) * (acts[4][i] - f.values[i]);
      }
      CHECK(r.mse == doctest::Approx(mse / kFrameLength).epsilon(1e-9));
    }
  }
  SUBCASE("batch encoding agrees with single-frame encoding") {
    const AEParams p = init_ae(5);
    Eigen::MatrixXd m(3, kFrameLength);
    std::vector<SpectralFrame> frames;
    for (int r = 0; r < 3; ++r) {
      frames.push_back(random_frame(70 + r));
      m.row(r) = as_row(frames.back());
    }
    const Eigen::MatrixXd codes = encode_batch(p, m);
    REQUIRE(codes.cols() == 50);
    for (int r = 0; r < 3; ++r) {
      const LatentFrame z = encode(p, frames[static_cast<std::size_t>(r)]);
      for (std::size_t i = 0; i < kLatentSize; ++i) CHECK(codes(r, static_cast<Eigen::Index>(i)) == doctest::Approx(z.code[i]).epsilon(1e-12));
    }
    CHECK_THROWS_AS(encode_batch(p, Eigen::MatrixXd(2, 10)), Error);
  }
}

TEST_CASE("reconstruction") {
  const Reconstruction r = reconstruct(init_ae(8), random_frame(9));
  REQUIRE(r.values.size() == kFrameLength);
  for (double v : r.values) REQUIRE((v > 0.0 && v < 1.0));

  // Zero parameters reconstruct every bin as sigmoid(0) = 0.5.
  SpectralFrame half;
  half.values.fill(0.5);
  CHECK(reconstruct(AEParams{}, half).mse == 0.0);
}

TEST_CASE("non-finite parameters are reported") {
  AEParams p = init_ae(1);
  p.data()[10] = std::numeric_limits<double>::quiet_NaN();
  CHECK_FALSE(p.all_finite());
  try {
    (void)encode(p, random_frame(1));
    FAIL("NaN propagated silently");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::non_finite_activation);
  }
}

TEST_CASE("backprop matches central differences") {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    AEParams p = init_ae(seed + 100);
    Rng rng(seed);
    for (double& v : p.data()) v += rng.uniform(-0.02, 0.02);  // non-zero biases too
    const SpectralFrame f = random_frame(seed + 200);
    const AEParams g = ae_backward(p, f);
    const LossFunction loss = [&](std::span<const double> theta) {
      AEParams q;
      std::copy(theta.begin(), theta.end(), q.data().begin());
      return reconstruct(q, f).mse;
    };
    const auto idx = sampled_indices(p, seed, 40);
    CHECK(grad_check(loss, p.data(), g.data(), 1e-5, idx) <= 1e-4);
  }
}

TEST_CASE("batch loss gradient is the mean of per-frame gradients") {
  const AEParams p = init_ae(21);
  const SpectralFrame a = random_frame(1), b = random_frame(2);
  Eigen::MatrixXd m(2, kFrameLength);
  m.row(0) = as_row(a);
  m.row(1) = as_row(b);
  AEParams g;
  const double loss = ae_loss(p, m, &g);
  CHECK(loss == doctest::Approx(0.5 * (reconstruct(p, a).mse + reconstruct(p, b).mse)).epsilon(1e-12));
  const AEParams ga = ae_backward(p, a), gb = ae_backward(p, b);
  for (std::size_t i = 0; i < g.data().size(); i += 997) {
    REQUIRE(g.data()[i] == doctest::Approx(0.5 * (ga.data()[i] + gb.data()[i])).epsilon(1e-9));
  }
}

TEST_CASE("zero input with zero biases gives zero weight gradients") {
  // Every hidden activation is tanh(0) = 0, so only the output bias learns.
  const AEParams g = ae_backward(init_ae(4), SpectralFrame{});
  for (std::size_t l = 0; l < kAeLayers; ++l) CHECK(g.weight(l).isZero(0.0));
  CHECK_FALSE(g.bias(3).isZero(0.0));
}

TEST_CASE("training") {
  Eigen::MatrixXd frames(300, kFrameLength);
  Rng rng(77);
  for (Eigen::Index r = 0; r < frames.rows(); ++r) {
    // Smooth bumps of varying position and width, like normalized spectra.
    const double centre = rng.uniform(50.0, 450.0), width = rng.uniform(20.0, 120.0), height = rng.uniform(0.2, 0.8);
    for (Eigen::Index c = 0; c < frames.cols(); ++c) {
      const double k = static_cast<double>(c <= 512 ? c : 1024 - c);
      frames(r, c) = 0.05 + height * std::exp(-0.5 * std::pow((k - centre) / width, 2.0));
    }
  }

  SUBCASE("zero epochs returns the initial parameters") {
    AETrainConfig cfg;
    cfg.epochs = 0;
    cfg.seed = 5;
    const AETrainResult r = train_ae(frames, cfg);
    CHECK(r.params == init_ae(5));
    CHECK(r.loss_trace.empty());
  }
  SUBCASE("200 epochs reduce the loss, deterministically") {
    AETrainConfig cfg;
    cfg.epochs = 200;
    cfg.seed = 5;
    const AETrainResult r = train_ae(frames, cfg);
    REQUIRE(r.loss_trace.size() == 200);
    for (double v : r.loss_trace) REQUIRE(std::isfinite(v));
    CHECK(r.loss_trace.back() < r.loss_trace.front());
    const double head = std::accumulate(r.loss_trace.begin(), r.loss_trace.begin() + 20, 0.0) / 20.0;
    const double tail = std::accumulate(r.loss_trace.end() - 20, r.loss_trace.end(), 0.0) / 20.0;
    CHECK(tail < head);
    CHECK(train_ae(frames, cfg).params == r.params);
  }
  SUBCASE("empty input and zero batch are rejected") {
    CHECK_THROWS_AS(train_ae(Eigen::MatrixXd(0, kFrameLength), AETrainConfig{}), Error);
    AETrainConfig cfg;
    cfg.batch = 0;
    CHECK_THROWS_AS(train_ae(frames, cfg), Error);
  }
}

TEST_CASE("gradient vanishes at a trained minimum") {
  Eigen::MatrixXd one(1, kFrameLength);
  for (Eigen::Index c = 0; c < one.cols(); ++c) one(0, c) = 0.3 + 0.2 * std::sin(0.01 * static_cast<double>(c));
  AETrainConfig cfg;
  cfg.epochs = 3000;
  cfg.batch = 1;
  cfg.seed = 9;
  const AETrainResult r = train_ae(one, cfg);
  AEParams g;
  (void)ae_loss(r.params, one, &g);
  const double norm = std::sqrt(std::inner_product(g.data().begin(), g.data().end(), g.data().begin(), 0.0));
  CHECK(norm < 1e-3);
}
