#pragma once

#include <optional>
#include <string_view>

namespace ctpji {

/// Patient-level diagnosis. Every slice inherits its patient's label.
enum class Label { Aseptic, Infected };

[[nodiscard]] constexpr std::string_view to_string(Label label) noexcept {
    return label == Label::Infected ? "infected" : "aseptic";
}

[[nodiscard]] constexpr std::optional<Label> parse_label(std::string_view text) noexcept {
    if (text == "aseptic") return Label::Aseptic;
    if (text == "infected") return Label::Infected;
    return std::nullopt;
}

}  // namespace ctpji
