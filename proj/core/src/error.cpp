#include "breath/error.hpp"

namespace breath {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::not_wav: return "NotWav";
    case Errc::unsupported_format: return "UnsupportedFormat";
    case Errc::empty_clip: return "EmptyClip";
    case Errc::negative_magnitude: return "NegativeMagnitude";
    case Errc::shape_mismatch: return "ShapeMismatch";
    case Errc::non_finite_loss: return "NonFiniteLoss";
    case Errc::non_finite_activation: return "NonFiniteActivation";
    case Errc::diverged_loss: return "DivergedLoss";
    case Errc::empty_eval_set: return "EmptyEvalSet";
    case Errc::empty_class: return "EmptyClass";
    case Errc::corpus_too_small: return "CorpusTooSmall";
    case Errc::io_error: return "IoError";
    case Errc::out_of_order_prediction: return "OutOfOrderPrediction";
    case Errc::non_monotonic_time: return "NonMonotonicTime";
    case Errc::domain_error: return "DomainError";
    case Errc::bad_magic: return "BadMagic";
    case Errc::version_mismatch: return "VersionMismatch";
    case Errc::truncated_file: return "TruncatedFile";
    case Errc::config_error: return "ConfigError";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code), detail_(message) {}

}  // namespace breath
