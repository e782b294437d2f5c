#include "qubus/text.hpp"

#include <charconv>
#include <cmath>

#include "qubus/errors.hpp"

namespace qubus {

std::string_view trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return text.substr(first, last - first + 1);
}

std::string format_real(double value) {
  if (value == 0.0) value = 0.0;  // drop negative zero
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string format_complex(Complex value) {
  const double im = value.imag() == 0.0 ? 0.0 : value.imag();
  std::string out = format_real(value.real());
  if (!std::signbit(im)) out += '+';
  out += format_real(im);
  out += 'i';
  return out;
}

double parse_real(std::string_view text) {
  text = trim(text);
  std::string_view body = text;
  if (!body.empty() && body.front() == '+') body.remove_prefix(1);
  double value = 0.0;
  const auto res = std::from_chars(body.data(), body.data() + body.size(), value);
  if (body.empty() || res.ec != std::errc{} || res.ptr != body.data() + body.size()) {
    throw ParseError("invalid real number '" + std::string(text) + "'");
  }
  if (!std::isfinite(value)) throw ParseError("non-finite number '" + std::string(text) + "'");
  return value;
}

namespace {

double parse_imag_coefficient(std::string_view body, std::string_view whole) {
  if (body.empty() || body == "+") return 1.0;
  if (body == "-") return -1.0;
  try {
    return parse_real(body);
  } catch (const ParseError&) {
    throw ParseError("invalid complex number '" + std::string(whole) + "'");
  }
}

}  // namespace

Complex parse_complex(std::string_view text) {
  text = trim(text);
  if (text.empty()) throw ParseError("empty complex number");

  // A '+' or '-' past the first character that does not follow an exponent
  // marker separates the real and imaginary parts.
  std::size_t split = std::string_view::npos;
  for (std::size_t i = 1; i < text.size(); ++i) {
    const char c = text[i];
    if ((c == '+' || c == '-') && text[i - 1] != 'e' && text[i - 1] != 'E') {
      split = i;
    }
  }
  const bool imaginary = text.back() == 'i';
  if (!imaginary) {
    if (split != std::string_view::npos) {
      throw ParseError("invalid complex number '" + std::string(text) + "' (missing 'i')");
    }
    return {parse_real(text), 0.0};
  }
  const std::string_view stem = text.substr(0, text.size() - 1);
  if (split == std::string_view::npos) return {0.0, parse_imag_coefficient(stem, text)};
  double re = 0.0;
  try {
    re = parse_real(stem.substr(0, split));
  } catch (const ParseError&) {
    throw ParseError("invalid complex number '" + std::string(text) + "'");
  }
  return {re, parse_imag_coefficient(stem.substr(split), text)};
}

}  // namespace qubus
