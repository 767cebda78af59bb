#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace breath {

inline constexpr double kDefaultAdagradEpsilon = 1e-8;

struct AdagradState {
  std::vector<double> accumulators;  // running sum of squared gradients, one per parameter
  double learning_rate = 0.01;
  double epsilon = kDefaultAdagradEpsilon;

  AdagradState() = default;
  AdagradState(std::size_t parameter_count, double lr, double eps = kDefaultAdagradEpsilon)
      : accumulators(parameter_count, 0.0), learning_rate(lr), epsilon(eps) {}
};

// G += g*g; theta -= lr * g / (sqrt(G) + eps), element-wise.
// Throws Errc::shape_mismatch when the three spans disagree in length.
void adagrad_step(std::span<double> params, std::span<const double> grads, AdagradState& state);

// Rescales grads in place so that their L2 norm is at most max_norm.
// Returns the norm before clipping.
double clip_global_norm(std::span<double> grads, double max_norm);

using LossFunction = std::function<double(std::span<const double>)>;

// Central-difference check of an analytic gradient. Returns the largest
// |a - n| / max(1, |a|, |n|) over the checked coordinates. When `indices` is
// empty every coordinate is checked. Throws Errc::non_finite_loss.
double grad_check(const LossFunction& loss, std::span<const double> params,
                  std::span<const double> analytic, double h = 1e-5,
                  std::span<const std::size_t> indices = {});

}  // namespace breath
