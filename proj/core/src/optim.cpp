#include "breath/optim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "breath/error.hpp"

namespace breath {

void adagrad_step(std::span<double> params, std::span<const double> grads, AdagradState& state) {
  if (params.size() != grads.size() || params.size() != state.accumulators.size()) {
    throw Error(Errc::shape_mismatch, "adagrad: params=" + std::to_string(params.size()) +
                                          " grads=" + std::to_string(grads.size()) +
                                          " accumulators=" +
                                          std::to_string(state.accumulators.size()));
  }
  const double lr = state.learning_rate;
  const double eps = state.epsilon;
  double* acc = state.accumulators.data();
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    acc[i] += g * g;
    params[i] -= lr * g / (std::sqrt(acc[i]) + eps);
  }
}

double clip_global_norm(std::span<double> grads, double max_norm) {
  double sq = 0.0;
  for (double g : grads) sq += g * g;
  const double norm = std::sqrt(sq);
  if (norm > max_norm && norm > 0.0) {
    const double scale = max_norm / norm;
    for (double& g : grads) g *= scale;
  }
  return norm;
}

double grad_check(const LossFunction& loss, std::span<const double> params,
                  std::span<const double> analytic, double h, std::span<const std::size_t> indices) {
  if (params.size() != analytic.size()) {
    throw Error(Errc::shape_mismatch, "grad_check: params=" + std::to_string(params.size()) +
                                          " analytic=" + std::to_string(analytic.size()));
  }
  std::vector<double> probe(params.begin(), params.end());
  auto evaluate = [&](std::size_t i) {
    const double original = probe[i];
    probe[i] = original + h;
    const double plus = loss(probe);
    probe[i] = original - h;
    const double minus = loss(probe);
    probe[i] = original;
    if (!std::isfinite(plus) || !std::isfinite(minus)) {
      throw Error(Errc::non_finite_loss, "loss not finite while perturbing parameter " +
                                             std::to_string(i));
    }
    const double numeric = (plus - minus) / (2.0 * h);
    const double a = analytic[i];
    return std::abs(a - numeric) / std::max({1.0, std::abs(a), std::abs(numeric)});
  };

  double worst = 0.0;
  if (indices.empty()) {
    for (std::size_t i = 0; i < params.size(); ++i) worst = std::max(worst, evaluate(i));
  } else {
    for (std::size_t i : indices) {
      if (i >= params.size()) {
        throw Error(Errc::shape_mismatch, "grad_check index " + std::to_string(i) + " out of range");
      }
      worst = std::max(worst, evaluate(i));
    }
  }
  return worst;
}

}  // namespace breath
