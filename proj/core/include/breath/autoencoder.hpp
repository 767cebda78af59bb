#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "breath/dsp.hpp"

namespace breath {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr std::size_t kLatentSize = 50;
inline constexpr std::size_t kAeHidden = 256;
inline constexpr std::size_t kAeLayers = 4;
inline constexpr std::array<std::size_t, kAeLayers + 1> kAeDims{kFrameLength, kAeHidden, kLatentSize,
                                                                kAeHidden, kFrameLength};

struct LatentFrame {
  std::array<double, kLatentSize> code{};  // tanh range (-1, 1)
  std::int64_t index = 0;

  double start_time() const noexcept { return static_cast<double>(index) * kFrameSeconds; }
};

// 1024 -> 256 -> 50 -> 256 -> 1024 perceptron. Hidden layers (bottleneck
// included) use tanh, the output layer a logistic sigmoid. Weights are stored
// [fan_in x fan_out] row-major, all tensors packed in one flat buffer:
// W0 b0 W1 b1 W2 b2 W3 b3. The same type doubles as the gradient container.
class AEParams {
 public:
  AEParams();

  static constexpr std::size_t parameter_count() noexcept {
    std::size_t n = 0;
    for (std::size_t l = 0; l < kAeLayers; ++l) n += kAeDims[l] * kAeDims[l + 1] + kAeDims[l + 1];
    return n;
  }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  Eigen::Map<RowMatrix> weight(std::size_t layer);
  Eigen::Map<const RowMatrix> weight(std::size_t layer) const;
  Eigen::Map<Eigen::RowVectorXd> bias(std::size_t layer);
  Eigen::Map<const Eigen::RowVectorXd> bias(std::size_t layer) const;

  std::size_t weight_offset(std::size_t layer) const noexcept;
  std::size_t bias_offset(std::size_t layer) const noexcept;

  bool all_finite() const noexcept;

  friend bool operator==(const AEParams&, const AEParams&) = default;

 private:
  std::vector<double> data_;
};

AEParams init_ae(std::uint64_t seed);

LatentFrame encode(const AEParams& params, const SpectralFrame& frame);
// Rows are frames (N x 1024) -> codes (N x 50).
Eigen::MatrixXd encode_batch(const AEParams& params, const Eigen::MatrixXd& spectra);

struct Reconstruction {
  std::vector<double> values;  // sigmoid range (0, 1)
  double mse = 0.0;
};

Reconstruction reconstruct(const AEParams& params, const SpectralFrame& frame);

// Mean (over rows) of the per-frame reconstruction mse. When `grad` is non-null
// it receives the exact gradient of that mean with respect to every parameter.
double ae_loss(const AEParams& params, const Eigen::MatrixXd& spectra, AEParams* grad = nullptr);

AEParams ae_backward(const AEParams& params, const SpectralFrame& frame);

struct AETrainConfig {
  std::size_t epochs = 200;
  std::size_t batch = 32;
  std::uint64_t seed = 1;
  double learning_rate = 0.05;
  std::size_t max_frames = 0;  // 0 = use every frame; otherwise a seeded subset
};

struct AETrainResult {
  AEParams params;
  std::vector<double> loss_trace;  // mean mse per epoch
};

// Adagrad on mini-batches of rows of `spectra`. Throws Errc::diverged_loss.
AETrainResult train_ae(const Eigen::MatrixXd& spectra, const AETrainConfig& config);

Eigen::MatrixXd to_matrix(std::span<const SpectralFrame> frames);

}  // namespace breath
