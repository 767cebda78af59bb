#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "breath/autoencoder.hpp"
#include "breath/corpus.hpp"
#include "breath/labels.hpp"
#include "breath/metrics.hpp"

namespace breath {

inline constexpr std::size_t kDefaultHidden = 75;
inline constexpr std::size_t kWindowFrames = kFramesPerClip;  // 16 frames = 2 s
inline constexpr double kWindowSeconds = static_cast<double>(kWindowFrames) * kFrameSeconds;

using WindowCodes = Eigen::Matrix<double, static_cast<int>(kWindowFrames),
                                  static_cast<int>(kLatentSize), Eigen::RowMajor>;

// 16 consecutive latent frames in time order.
class Window {
 public:
  Window(const WindowCodes& codes, std::int64_t first_index);
  // Throws Errc::domain_error unless there are exactly 16 frames with
  // consecutive indices.
  explicit Window(std::span<const LatentFrame> frames);

  const WindowCodes& codes() const noexcept { return codes_; }
  std::int64_t first_index() const noexcept { return first_index_; }
  LatentFrame frame(std::size_t i) const;
  double end_time() const noexcept {
    return static_cast<double>(first_index_ + static_cast<std::int64_t>(kWindowFrames)) * kFrameSeconds;
  }

 private:
  WindowCodes codes_;
  std::int64_t first_index_;
};

// Spectra of a 2 s clip pushed through the encoder.
Window clip_window(const AEParams& ae, const AudioClip& clip);

// Elman network, tanh hidden layer, one sigmoid per class on the final state.
// Shapes (row-major, fan_in x fan_out): W_xh 50xH, W_hh HxH, b_h H, W_hy Hx3, b_y 3.
class RNNParams {
 public:
  explicit RNNParams(std::size_t hidden = kDefaultHidden);

  std::size_t hidden() const noexcept { return hidden_; }
  static std::size_t parameter_count(std::size_t hidden) noexcept;

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  Eigen::Map<RowMatrix> w_xh();
  Eigen::Map<const RowMatrix> w_xh() const;
  Eigen::Map<RowMatrix> w_hh();
  Eigen::Map<const RowMatrix> w_hh() const;
  Eigen::Map<Eigen::RowVectorXd> b_h();
  Eigen::Map<const Eigen::RowVectorXd> b_h() const;
  Eigen::Map<RowMatrix> w_hy();
  Eigen::Map<const RowMatrix> w_hy() const;
  Eigen::Map<Eigen::RowVectorXd> b_y();
  Eigen::Map<const Eigen::RowVectorXd> b_y() const;

  bool all_finite() const noexcept;

  friend bool operator==(const RNNParams&, const RNNParams&) = default;

 private:
  std::size_t hidden_;
  std::vector<double> data_;
};

RNNParams init_rnn(std::uint64_t seed, std::size_t hidden = kDefaultHidden);

// Independent per-class confidences ordered (inhale, exhale, unknown).
struct ClassScores {
  std::array<double, kNumClasses> values{};

  double operator[](Label l) const noexcept { return values[index_of(l)]; }
};

ClassScores rnn_forward(const RNNParams& params, const Window& window);

struct RNNGradient {
  double loss = 0.0;
  RNNParams grad;
};

// Summed per-class binary cross-entropy and its exact BPTT gradient. Targets
// may be any values in [0, 1]; training uses one-hot vectors.
RNNGradient rnn_backward(const RNNParams& params, const Window& window,
                         const std::array<double, kNumClasses>& target);
RNNGradient rnn_backward(const RNNParams& params, const Window& window, Label target);

std::array<double, kNumClasses> one_hot(Label label) noexcept;

struct Classification {
  Label label = Label::unknown;
  double confidence = 0.0;
};

// argmax; ties resolve to the earlier class in (inhale, exhale, unknown).
Classification classify(const ClassScores& scores) noexcept;

struct RNNTrainConfig {
  std::size_t epochs = 300;
  std::uint64_t seed = 1;
  double learning_rate = 0.01;
  std::size_t hidden = kDefaultHidden;
  bool noise_augmentation = true;
  double clip_norm = 5.0;
};

struct EpochMetrics {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double validation_accuracy = 0.0;
};

struct RNNTrainResult {
  RNNParams params;
  std::vector<EpochMetrics> trace;
};

// Per epoch: draw validation/training clips from `plan`, optionally add
// noise, encode through the frozen autoencoder, one Adagrad step per clip,
// then score the validation draw. Test clips are never touched.
RNNTrainResult train_rnn(const Corpus& corpus, const SplitPlan& plan, const AEParams& ae,
                         const RNNTrainConfig& config);

// Throws Errc::empty_eval_set, Errc::domain_error for unlabeled clips.
EvalReport evaluate(const RNNParams& params, const AEParams& ae, std::span<const AudioClip> clips);

}  // namespace breath
