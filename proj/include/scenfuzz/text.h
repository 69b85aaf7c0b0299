#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace scenfuzz {

// Shortest decimal form that parses back to the same double.
std::string FormatDouble(double value);

// "[v0, v1, ...]" with FormatDouble elements.
std::string FormatVector(std::span<const double> values);

// Parses a whole token (surrounding whitespace allowed) as a double.
std::optional<double> ParseDouble(std::string_view text);

std::string_view Trim(std::string_view text);

}  // namespace scenfuzz
