#include "pin/rational.hpp"

#include <cctype>

namespace pin {

std::string to_string(const rational& r) {
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

namespace {

std::int64_t parse_int(const std::string& s, size_t& i) {
  if (i >= s.size() || !std::isdigit(static_cast<unsigned char>(s[i])))
    throw std::invalid_argument("expected digits in rational literal: '" + s + "'");
  std::int64_t v = 0;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
    v = v * 10 + (s[i] - '0');
    ++i;
  }
  return v;
}

} // namespace

rational parse_rational(const std::string& text) {
  size_t i = 0;
  bool negative = false;
  if (i < text.size() && (text[i] == '-' || text[i] == '+')) {
    negative = text[i] == '-';
    ++i;
  }
  std::int64_t whole = parse_int(text, i);
  rational value(whole, 1);
  if (i < text.size() && text[i] == '/') {
    ++i;
    std::int64_t den = parse_int(text, i);
    if (den == 0) throw std::invalid_argument("zero denominator: '" + text + "'");
    value = rational(whole, den);
  } else if (i < text.size() && text[i] == '.') {
    ++i;
    std::int64_t scale = 1, frac = 0;
    if (i >= text.size() || !std::isdigit(static_cast<unsigned char>(text[i])))
      throw std::invalid_argument("bad decimal literal: '" + text + "'");
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      frac = frac * 10 + (text[i] - '0');
      scale *= 10;
      ++i;
    }
    value = rational(whole, 1) + rational(frac, scale);
  }
  if (i != text.size())
    throw std::invalid_argument("trailing characters in rational literal: '" + text + "'");
  return negative ? -value : value;
}

} // namespace pin
