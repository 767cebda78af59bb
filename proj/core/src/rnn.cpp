#include "breath/rnn.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "breath/error.hpp"
#include "breath/optim.hpp"
#include "breath/rng.hpp"

namespace breath {
namespace {

struct Layout {
  std::size_t w_xh, w_hh, b_h, w_hy, b_y, total;
};

Layout layout(std::size_t h) {
  Layout l{};
  l.w_xh = 0;
  l.w_hh = l.w_xh + kLatentSize * h;
  l.b_h = l.w_hh + h * h;
  l.w_hy = l.b_h + h;
  l.b_y = l.w_hy + h * kNumClasses;
  l.total = l.b_y + kNumClasses;
  return l;
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// log(1 + e^z) without overflow.
double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

using Index = Eigen::Index;

// Hidden states h_1..h_16 (rows), with h_0 = 0 implied.
Eigen::MatrixXd hidden_states(const RNNParams& p, const Window& w) {
  const Index steps = static_cast<Index>(kWindowFrames);
  Eigen::MatrixXd pre = w.codes() * p.w_xh();
  pre.rowwise() += p.b_h();
  Eigen::MatrixXd h(steps, static_cast<Index>(p.hidden()));
  h.row(0) = pre.row(0).array().tanh();
  for (Index t = 1; t < steps; ++t) {
    h.row(t) = (pre.row(t) + h.row(t - 1) * p.w_hh()).array().tanh();
  }
  return h;
}

Eigen::RowVector3d logits(const RNNParams& p, const Eigen::MatrixXd& h) {
  return h.row(h.rows() - 1) * p.w_hy() + p.b_y();
}

}  // namespace

Window::Window(const WindowCodes& codes, std::int64_t first_index)
    : codes_(codes), first_index_(first_index) {}

Window::Window(std::span<const LatentFrame> frames) : first_index_(0) {
  if (frames.size() != kWindowFrames) {
    throw Error(Errc::domain_error, "window needs 16 frames, got " + std::to_string(frames.size()));
  }
  first_index_ = frames.front().index;
  for (std::size_t t = 0; t < kWindowFrames; ++t) {
    if (frames[t].index != first_index_ + static_cast<std::int64_t>(t)) {
      throw Error(Errc::domain_error, "window frames are not consecutive at position " +
                                          std::to_string(t));
    }
    for (std::size_t i = 0; i < kLatentSize; ++i) {
      codes_(static_cast<Index>(t), static_cast<Index>(i)) = frames[t].code[i];
    }
  }
}

LatentFrame Window::frame(std::size_t i) const {
  LatentFrame f;
  f.index = first_index_ + static_cast<std::int64_t>(i);
  for (std::size_t k = 0; k < kLatentSize; ++k) f.code[k] = codes_(static_cast<Index>(i), static_cast<Index>(k));
  return f;
}

Window clip_window(const AEParams& ae, const AudioClip& clip) {
  const std::vector<SpectralFrame> spectra = spectral_frames(clip);
  if (spectra.size() != kWindowFrames) {
    throw Error(Errc::shape_mismatch, "clip yields " + std::to_string(spectra.size()) +
                                          " frames, a window needs 16");
  }
  const Eigen::MatrixXd codes = encode_batch(ae, to_matrix(spectra));
  return Window(WindowCodes(codes), 0);
}

RNNParams::RNNParams(std::size_t hidden) : hidden_(hidden), data_(layout(hidden).total, 0.0) {
  if (hidden == 0) throw Error(Errc::domain_error, "hidden size must be positive");
}

std::size_t RNNParams::parameter_count(std::size_t hidden) noexcept { return layout(hidden).total; }

#define BREATH_RNN_MAP(name, Type, off, rows, cols)                                               \
  Eigen::Map<Type> RNNParams::name() {                                                            \
    return {data_.data() + layout(hidden_).off, static_cast<Index>(rows), static_cast<Index>(cols)}; \
  }                                                                                               \
  Eigen::Map<const Type> RNNParams::name() const {                                                \
    return {data_.data() + layout(hidden_).off, static_cast<Index>(rows), static_cast<Index>(cols)}; \
  }

BREATH_RNN_MAP(w_xh, RowMatrix, w_xh, kLatentSize, hidden_)
BREATH_RNN_MAP(w_hh, RowMatrix, w_hh, hidden_, hidden_)
BREATH_RNN_MAP(w_hy, RowMatrix, w_hy, hidden_, kNumClasses)
#undef BREATH_RNN_MAP

Eigen::Map<Eigen::RowVectorXd> RNNParams::b_h() {
  return {data_.data() + layout(hidden_).b_h, static_cast<Index>(hidden_)};
}
Eigen::Map<const Eigen::RowVectorXd> RNNParams::b_h() const {
  return {data_.data() + layout(hidden_).b_h, static_cast<Index>(hidden_)};
}
Eigen::Map<Eigen::RowVectorXd> RNNParams::b_y() {
  return {data_.data() + layout(hidden_).b_y, static_cast<Index>(kNumClasses)};
}
Eigen::Map<const Eigen::RowVectorXd> RNNParams::b_y() const {
  return {data_.data() + layout(hidden_).b_y, static_cast<Index>(kNumClasses)};
}

bool RNNParams::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

RNNParams init_rnn(std::uint64_t seed, std::size_t hidden) {
  RNNParams p(hidden);
  Rng rng(derive_seed(seed, {0x22, hidden}));
  auto fill = [&](auto&& m, std::size_t fan_in, std::size_t fan_out) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-limit, limit);
  };
  fill(p.w_xh(), kLatentSize, hidden);
  fill(p.w_hh(), hidden, hidden);
  fill(p.w_hy(), hidden, kNumClasses);
  return p;
}

ClassScores rnn_forward(const RNNParams& params, const Window& window) {
  const Eigen::MatrixXd h = hidden_states(params, window);
  const Eigen::RowVector3d z = logits(params, h);
  ClassScores s;
  for (std::size_t c = 0; c < kNumClasses; ++c) s.values[c] = sigmoid(z(static_cast<Index>(c)));
  if (!std::all_of(s.values.begin(), s.values.end(), [](double v) { return std::isfinite(v); })) {
    throw Error(Errc::non_finite_activation, "rnn output");
  }
  return s;
}

std::array<double, kNumClasses> one_hot(Label label) noexcept {
  std::array<double, kNumClasses> t{};
  t[index_of(label)] = 1.0;
  return t;
}

RNNGradient rnn_backward(const RNNParams& params, const Window& window,
                         const std::array<double, kNumClasses>& target) {
  const Index steps = static_cast<Index>(kWindowFrames);
  const Eigen::MatrixXd h = hidden_states(params, window);
  const Eigen::RowVector3d z = logits(params, h);

  RNNGradient out{0.0, RNNParams(params.hidden())};
  Eigen::RowVector3d dz;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const double zc = z(static_cast<Index>(c));
    const double y = target[c];
    // -[y log s + (1-y) log(1-s)] with log s = -softplus(-z), log(1-s) = -softplus(z)
    out.loss += y * softplus(-zc) + (1.0 - y) * softplus(zc);
    dz(static_cast<Index>(c)) = sigmoid(zc) - y;
  }

  RNNParams& g = out.grad;
  g.w_hy().noalias() = h.row(steps - 1).transpose() * dz;
  g.b_y() = dz;

  Eigen::RowVectorXd dh = dz * params.w_hy().transpose();
  Eigen::MatrixXd da(steps, static_cast<Index>(params.hidden()));
  for (Index t = steps - 1; t >= 0; --t) {
    da.row(t) = dh.array() * (1.0 - h.row(t).array().square());
    if (t > 0) dh = da.row(t) * params.w_hh().transpose();
  }
  g.w_xh().noalias() = window.codes().transpose() * da;
  g.w_hh().noalias() = h.topRows(steps - 1).transpose() * da.bottomRows(steps - 1);
  g.b_h() = da.colwise().sum();
  return out;
}

RNNGradient rnn_backward(const RNNParams& params, const Window& window, Label target) {
  return rnn_backward(params, window, one_hot(target));
}

Classification classify(const ClassScores& scores) noexcept {
  std::size_t best = 0;
  for (std::size_t c = 1; c < kNumClasses; ++c) {
    if (scores.values[c] > scores.values[best]) best = c;
  }
  return {kAllLabels[best], scores.values[best]};
}

RNNTrainResult train_rnn(const Corpus& corpus, const SplitPlan& plan, const AEParams& ae,
                         const RNNTrainConfig& config) {
  if (plan.corpus_size() != corpus.size()) {
    throw Error(Errc::shape_mismatch, "split plan built for " + std::to_string(plan.corpus_size()) +
                                          " clips, corpus has " + std::to_string(corpus.size()));
  }
  RNNTrainResult result{init_rnn(config.seed, config.hidden), {}};
  if (config.epochs == 0) return result;

  // Clean windows for validation scoring (and training when augmentation is off).
  std::vector<std::optional<Window>> clean(corpus.size());
  auto clean_window = [&](std::size_t id) -> const Window& {
    if (!clean[id]) clean[id] = clip_window(ae, corpus.clips[id].clip);
    return *clean[id];
  };

  AdagradState state(result.params.data().size(), config.learning_rate);
  result.trace.reserve(config.epochs);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const EpochDraw draw = plan.draw(epoch);
    double total = 0.0;
    for (std::size_t id : draw.training) {
      const CorpusClip& item = corpus.clips[id];
      RNNGradient step = config.noise_augmentation
                             ? rnn_backward(result.params,
                                            clip_window(ae, augment_noise(item.clip, derive_seed(config.seed, {epoch, id}))),
                                            item.label)
                             : rnn_backward(result.params, clean_window(id), item.label);
      if (!std::isfinite(step.loss)) {
        throw Error(Errc::diverged_loss, "rnn loss became non-finite at epoch " + std::to_string(epoch));
      }
      clip_global_norm(step.grad.data(), config.clip_norm);
      adagrad_step(result.params.data(), step.grad.data(), state);
      total += step.loss;
    }

    std::size_t correct = 0;
    for (std::size_t id : draw.validation) {
      if (classify(rnn_forward(result.params, clean_window(id))).label == corpus.clips[id].label) ++correct;
    }
    result.trace.push_back({epoch, total / static_cast<double>(std::max<std::size_t>(1, draw.training.size())),
                            draw.validation.empty()
                                ? 0.0
                                : static_cast<double>(correct) / static_cast<double>(draw.validation.size())});
  }
  return result;
}

EvalReport evaluate(const RNNParams& params, const AEParams& ae, std::span<const AudioClip> clips) {
  if (clips.empty()) throw Error(Errc::empty_eval_set, "no clips to evaluate");
  std::vector<Label> truth;
  std::vector<Label> predicted;
  truth.reserve(clips.size());
  predicted.reserve(clips.size());
  for (std::size_t i = 0; i < clips.size(); ++i) {
    if (!clips[i].label) throw Error(Errc::domain_error, "clip " + std::to_string(i) + " has no label");
    truth.push_back(*clips[i].label);
    predicted.push_back(classify(rnn_forward(params, clip_window(ae, clips[i]))).label);
  }
  return score_predictions(truth, predicted);
}

}  // namespace breath
