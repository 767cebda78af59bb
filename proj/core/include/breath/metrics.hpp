#pragma once

#include <array>
#include <cstddef>
#include <span>

#include "breath/labels.hpp"

namespace breath {

// confusion[truth][predicted]
using ConfusionMatrix = std::array<std::array<std::size_t, kNumClasses>, kNumClasses>;

struct EvalReport {
  double accuracy = 0.0;
  std::array<double, kNumClasses> f1{};
  double macro_f1 = 0.0;
  ConfusionMatrix confusion{};
  std::size_t count = 0;
};

// Standard classification metrics; F1 of a class with no true and no
// predicted members counts as 1. Throws Errc::empty_eval_set.
EvalReport score_predictions(std::span<const Label> truth, std::span<const Label> predicted);

}  // namespace breath
