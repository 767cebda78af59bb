#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace breath {

enum class Errc {
  not_wav,
  unsupported_format,
  empty_clip,
  negative_magnitude,
  shape_mismatch,
  non_finite_loss,
  non_finite_activation,
  diverged_loss,
  empty_eval_set,
  empty_class,
  corpus_too_small,
  io_error,
  out_of_order_prediction,
  non_monotonic_time,
  domain_error,
  bad_magic,
  version_mismatch,
  truncated_file,
  config_error,
};

std::string_view errc_name(Errc code) noexcept;

// Every failure surfaced by the library carries one of the codes above; the
// message holds the human-readable detail (offending field, path, tensor...).
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);

  Errc code() const noexcept { return code_; }
  // The message without the code name prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  Errc code_;
  std::string detail_;
};

}  // namespace breath
