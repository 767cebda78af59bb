#include "breath/metrics.hpp"

#include <string>

#include "breath/error.hpp"

namespace breath {

EvalReport score_predictions(std::span<const Label> truth, std::span<const Label> predicted) {
  if (truth.size() != predicted.size()) {
    throw Error(Errc::shape_mismatch, "truth/prediction counts differ: " +
                                          std::to_string(truth.size()) + " vs " +
                                          std::to_string(predicted.size()));
  }
  if (truth.empty()) throw Error(Errc::empty_eval_set, "no labeled clips to evaluate");

  EvalReport r;
  r.count = truth.size();
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ++r.confusion[index_of(truth[i])][index_of(predicted[i])];
    if (truth[i] == predicted[i]) ++correct;
  }
  r.accuracy = static_cast<double>(correct) / static_cast<double>(truth.size());

  double sum = 0.0;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    std::size_t tp = r.confusion[c][c];
    std::size_t fp = 0;
    std::size_t fn = 0;
    for (std::size_t o = 0; o < kNumClasses; ++o) {
      if (o == c) continue;
      fp += r.confusion[o][c];
      fn += r.confusion[c][o];
    }
    const std::size_t denom = 2 * tp + fp + fn;
    r.f1[c] = denom == 0 ? 1.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
    sum += r.f1[c];
  }
  r.macro_f1 = sum / static_cast<double>(kNumClasses);
  return r;
}

}  // namespace breath
