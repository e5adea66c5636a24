#pragma once

#include <compare>
#include <set>
#include <string>
#include <vector>

namespace pin {

// Channel / variable names. Compared and ordered by identifier.
struct name {
  std::string id;

  name() = default;
  explicit name(std::string s) : id(std::move(s)) {}
  name(const char* s) : id(s) {}

  auto operator<=>(const name&) const = default;
};

using name_set = std::set<name>;

// Internal names "#0", "#1", ... live in a reserved namespace the parser
// rejects, so they are always fresh relative to user input.
name internal_name(int k);
bool is_internal(const name& n);

// Smallest "f0", "f1", ... not contained in avoid. Used for the canonical
// fresh member of instantiation sets; stays parseable.
name fresh_name(const name_set& avoid);

// Smallest internal name not contained in avoid.
name fresh_internal(const name_set& avoid);

std::string render_names(const name_set& ns); // "{a, b, c}"

} // namespace pin
