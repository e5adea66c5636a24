#pragma once

#include <boost/rational.hpp>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace pin {

// Exact rational probabilities. Equivalence checking compares probabilities
// for equality, so no floating point anywhere in the semantics.
using rational = boost::rational<std::int64_t>;

inline rational rat(std::int64_t num, std::int64_t den = 1) { return rational(num, den); }

std::string to_string(const rational& r);

// Accepts "7/10", "1", and decimal literals like "0.5" (converted exactly).
rational parse_rational(const std::string& text);

} // namespace pin
