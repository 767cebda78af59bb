#include "breath/autoencoder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "breath/error.hpp"
#include "breath/optim.hpp"
#include "breath/rng.hpp"

namespace breath {
namespace {

constexpr std::array<std::size_t, kAeLayers * 2> layout_offsets() {
  std::array<std::size_t, kAeLayers * 2> out{};
  std::size_t at = 0;
  for (std::size_t l = 0; l < kAeLayers; ++l) {
    out[2 * l] = at;
    at += kAeDims[l] * kAeDims[l + 1];
    out[2 * l + 1] = at;
    at += kAeDims[l + 1];
  }
  return out;
}

constexpr auto kOffsets = layout_offsets();

Eigen::MatrixXd sigmoid(const Eigen::MatrixXd& z) {
  return z.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}

// Activations of every layer; acts[0] is the input.
struct ForwardPass {
  std::array<Eigen::MatrixXd, kAeLayers + 1> acts;
};

ForwardPass forward(const AEParams& p, const Eigen::MatrixXd& x, std::size_t layers = kAeLayers) {
  ForwardPass fp;
  fp.acts[0] = x;
  for (std::size_t l = 0; l < layers; ++l) {
    Eigen::MatrixXd z = fp.acts[l] * p.weight(l);
    z.rowwise() += p.bias(l);
    fp.acts[l + 1] = (l + 1 == kAeLayers) ? sigmoid(z) : Eigen::MatrixXd(z.array().tanh());
  }
  return fp;
}

void require_finite(const Eigen::MatrixXd& m, const char* where) {
  if (!m.allFinite()) throw Error(Errc::non_finite_activation, where);
}

Eigen::RowVectorXd row_of(const SpectralFrame& frame) {
  return Eigen::Map<const Eigen::RowVectorXd>(frame.values.data(), kFrameLength);
}

}  // namespace

AEParams::AEParams() : data_(parameter_count(), 0.0) {}

std::size_t AEParams::weight_offset(std::size_t layer) const noexcept { return kOffsets[2 * layer]; }
std::size_t AEParams::bias_offset(std::size_t layer) const noexcept { return kOffsets[2 * layer + 1]; }

Eigen::Map<RowMatrix> AEParams::weight(std::size_t layer) {
  return {data_.data() + weight_offset(layer), static_cast<Eigen::Index>(kAeDims[layer]),
          static_cast<Eigen::Index>(kAeDims[layer + 1])};
}

Eigen::Map<const RowMatrix> AEParams::weight(std::size_t layer) const {
  return {data_.data() + weight_offset(layer), static_cast<Eigen::Index>(kAeDims[layer]),
          static_cast<Eigen::Index>(kAeDims[layer + 1])};
}

Eigen::Map<Eigen::RowVectorXd> AEParams::bias(std::size_t layer) {
  return {data_.data() + bias_offset(layer), static_cast<Eigen::Index>(kAeDims[layer + 1])};
}

Eigen::Map<const Eigen::RowVectorXd> AEParams::bias(std::size_t layer) const {
  return {data_.data() + bias_offset(layer), static_cast<Eigen::Index>(kAeDims[layer + 1])};
}

bool AEParams::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

AEParams init_ae(std::uint64_t seed) {
  AEParams p;
  Rng rng(derive_seed(seed, {0xAE}));
  for (std::size_t l = 0; l < kAeLayers; ++l) {
    const double limit = std::sqrt(6.0 / static_cast<double>(kAeDims[l] + kAeDims[l + 1]));
    auto w = p.weight(l);
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = rng.uniform(-limit, limit);
  }
  return p;
}

Eigen::MatrixXd to_matrix(std::span<const SpectralFrame> frames) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(frames.size()), static_cast<Eigen::Index>(kFrameLength));
  for (std::size_t i = 0; i < frames.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = row_of(frames[i]);
  return m;
}

Eigen::MatrixXd encode_batch(const AEParams& params, const Eigen::MatrixXd& spectra) {
  if (spectra.cols() != static_cast<Eigen::Index>(kFrameLength)) {
    throw Error(Errc::shape_mismatch, "encode_batch expects 1024 columns, got " +
                                          std::to_string(spectra.cols()));
  }
  ForwardPass fp = forward(params, spectra, 2);
  require_finite(fp.acts[2], "encoder output");
  return std::move(fp.acts[2]);
}

LatentFrame encode(const AEParams& params, const SpectralFrame& frame) {
  const Eigen::MatrixXd code = encode_batch(params, row_of(frame));
  LatentFrame out;
  out.index = frame.index;
  for (std::size_t i = 0; i < kLatentSize; ++i) out.code[i] = code(0, static_cast<Eigen::Index>(i));
  return out;
}

Reconstruction reconstruct(const AEParams& params, const SpectralFrame& frame) {
  const Eigen::RowVectorXd x = row_of(frame);
  const ForwardPass fp = forward(params, x);
  const Eigen::MatrixXd& r = fp.acts[kAeLayers];
  require_finite(r, "decoder output");
  Reconstruction out;
  out.values.assign(r.data(), r.data() + r.size());
  out.mse = (r - x).squaredNorm() / static_cast<double>(kFrameLength);
  return out;
}

double ae_loss(const AEParams& params, const Eigen::MatrixXd& spectra, AEParams* grad) {
  const ForwardPass fp = forward(params, spectra);
  const Eigen::MatrixXd& r = fp.acts[kAeLayers];
  const double rows = static_cast<double>(spectra.rows());
  const double denom = rows * static_cast<double>(kFrameLength);
  Eigen::MatrixXd diff = r - spectra;
  const double loss = diff.squaredNorm() / denom;
  if (grad == nullptr) return loss;

  // dL/dz at the sigmoid output.
  Eigen::MatrixXd delta = (2.0 / denom) * diff.array() * r.array() * (1.0 - r.array());
  for (std::size_t l = kAeLayers; l-- > 0;) {
    grad->weight(l).noalias() = fp.acts[l].transpose() * delta;
    grad->bias(l) = delta.colwise().sum();
    if (l == 0) break;
    Eigen::MatrixXd back = delta * params.weight(l).transpose();
    delta = back.array() * (1.0 - fp.acts[l].array().square());
  }
  return loss;
}

AEParams ae_backward(const AEParams& params, const SpectralFrame& frame) {
  AEParams grad;
  ae_loss(params, row_of(frame), &grad);
  return grad;
}

AETrainResult train_ae(const Eigen::MatrixXd& spectra, const AETrainConfig& config) {
  if (spectra.rows() == 0) throw Error(Errc::domain_error, "train_ae needs at least one frame");
  if (config.batch == 0) throw Error(Errc::domain_error, "batch size must be positive");

  AETrainResult result{init_ae(config.seed), {}};
  if (config.epochs == 0) return result;

  Rng rng(derive_seed(config.seed, {0xAE7}));
  std::vector<Eigen::Index> rows(static_cast<std::size_t>(spectra.rows()));
  std::iota(rows.begin(), rows.end(), Eigen::Index{0});
  if (config.max_frames > 0 && config.max_frames < rows.size()) {
    rng.shuffle(std::span(rows));
    rows.resize(config.max_frames);
    std::sort(rows.begin(), rows.end());
  }
  const Eigen::MatrixXd data = spectra(rows, Eigen::all);
  std::vector<Eigen::Index> order(rows.size());
  std::iota(order.begin(), order.end(), Eigen::Index{0});

  AdagradState state(AEParams::parameter_count(), config.learning_rate);
  AEParams grad;
  result.loss_trace.reserve(config.epochs);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(std::span(order));
    double total = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch) {
      const std::size_t end = std::min(order.size(), start + config.batch);
      const std::vector<Eigen::Index> idx(order.begin() + static_cast<std::ptrdiff_t>(start),
                                          order.begin() + static_cast<std::ptrdiff_t>(end));
      const Eigen::MatrixXd batch = data(idx, Eigen::all);
      const double loss = ae_loss(result.params, batch, &grad);
      if (!std::isfinite(loss)) {
        throw Error(Errc::diverged_loss, "autoencoder loss became non-finite at epoch " +
                                             std::to_string(epoch));
      }
      adagrad_step(result.params.data(), grad.data(), state);
      total += loss;
      ++batches;
    }
    result.loss_trace.push_back(total / static_cast<double>(batches));
  }
  return result;
}

}  // namespace breath
