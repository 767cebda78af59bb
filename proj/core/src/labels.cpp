#include "breath/labels.hpp"

namespace breath {

std::string_view to_string(Label label) noexcept {
  switch (label) {
    case Label::inhale: return "inhale";
    case Label::exhale: return "exhale";
    case Label::unknown: return "unknown";
  }
  return "unknown";
}

std::optional<Label> parse_label(std::string_view text) noexcept {
  for (Label l : kAllLabels) {
    if (to_string(l) == text) return l;
  }
  return std::nullopt;
}

}  // namespace breath
