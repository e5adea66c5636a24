#include "pin/name.hpp"

#include <sstream>

namespace pin {

name internal_name(int k) { return name("#" + std::to_string(k)); }

bool is_internal(const name& n) { return !n.id.empty() && n.id[0] == '#'; }

name fresh_name(const name_set& avoid) {
  for (int k = 0;; ++k) {
    name candidate("f" + std::to_string(k));
    if (!avoid.count(candidate)) return candidate;
  }
}

name fresh_internal(const name_set& avoid) {
  for (int k = 0;; ++k) {
    name candidate = internal_name(k);
    if (!avoid.count(candidate)) return candidate;
  }
}

std::string render_names(const name_set& ns) {
  std::ostringstream out;
  out << "{";
  bool first = true;
  for (const auto& n : ns) {
    if (!first) out << ", ";
    out << n.id;
    first = false;
  }
  out << "}";
  return out.str();
}

} // namespace pin
