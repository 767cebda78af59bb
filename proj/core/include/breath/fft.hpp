#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace breath {

// Iterative radix-2 decimation-in-time FFT for a fixed power-of-two size.
// A plan is immutable after construction and may be shared between threads.
class FftPlan {
 public:
  explicit FftPlan(std::size_t size);

  std::size_t size() const noexcept { return size_; }

  // X[k] = sum_n x[n] e^{-2 pi i k n / N}
  void forward(std::span<std::complex<double>> data) const;
  // Unnormalized inverse; callers divide by N.
  void inverse(std::span<std::complex<double>> data) const;

 private:
  void transform(std::span<std::complex<double>> data, bool inverse) const;

  std::size_t size_;
  std::vector<std::complex<double>> twiddles_;
  std::vector<std::size_t> bit_reverse_;
};

bool is_power_of_two(std::size_t n) noexcept;

}  // namespace breath
