#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

namespace breath {

// Class order is significant: it fixes score layout and the argmax tie-break.
enum class Label : std::size_t { inhale = 0, exhale = 1, unknown = 2 };

inline constexpr std::size_t kNumClasses = 3;
inline constexpr std::array<Label, kNumClasses> kAllLabels{Label::inhale, Label::exhale,
                                                           Label::unknown};

constexpr std::size_t index_of(Label label) noexcept { return static_cast<std::size_t>(label); }

std::string_view to_string(Label label) noexcept;
std::optional<Label> parse_label(std::string_view text) noexcept;

constexpr bool is_breath(Label label) noexcept { return label != Label::unknown; }

}  // namespace breath
