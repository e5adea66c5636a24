#pragma once

#include <initializer_list>
#include <map>
#include <string>
#include <utility>

#include "pin/process.hpp"

namespace pin {

// A substitution is a function on names that is the identity outside a
// finite domain.
class substitution {
public:
  substitution() = default;
  // {y/x}: maps x to y. Pairs are given as (from, to).
  substitution(std::initializer_list<std::pair<name, name>> pairs);

  static substitution single(const name& from, const name& to);

  name operator()(const name& n) const;
  void set(const name& from, const name& to); // dropped if from == to
  void erase(const name& from);

  bool is_identity() const { return map_.empty(); }
  const std::map<name, name>& mapping() const { return map_; }

  name_set domain() const;
  name_set range() const;
  std::string render() const; // "{a->b, c->d}" ("{}" for identity)

private:
  std::map<name, name> map_;
};

// Pσ: free names and weakly bound names are replaced; strongly bound binders
// are renamed to fresh internal names only where a replacement would
// otherwise become strongly bound (capture). Restriction binders follow
// ((nu z)P)σ = (nu zσ)Pσ verbatim.
proc apply_substitution(const proc& p, const substitution& s);

} // namespace pin
