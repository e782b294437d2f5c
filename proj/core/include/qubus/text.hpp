#pragma once

#include <string>
#include <string_view>

#include "qubus/phase_space.hpp"

namespace qubus {

/// Shortest decimal form that parses back to the same double.
std::string format_real(double value);

/// "re+imi" form, e.g. "0.3+0.5i", "-1-2e-05i".
std::string format_complex(Complex value);

/// Parses a full-string real; throws ParseError.
double parse_real(std::string_view text);

/// Accepts "re+imi", "re-imi", "re", "imi", "i", "-i"; throws ParseError.
Complex parse_complex(std::string_view text);

std::string_view trim(std::string_view text);

}  // namespace qubus
