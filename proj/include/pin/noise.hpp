#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <utility>

#include "pin/name.hpp"
#include "pin/process.hpp"
#include "pin/rational.hpp"
#include "pin/subst.hpp"

namespace pin {

struct noise_error : std::runtime_error {
  int line;
  noise_error(int line, const std::string& what);
};

// One row p_x(.|y) of a channel matrix: the distribution of received names
// when y is sent. Entries are strictly positive and sum to exactly 1; the
// support is finite.
struct noise_row {
  std::map<name, rational> support;

  rational probability(const name& received) const;
  bool is_identity_on(const name& input) const;
};

// Channel matrices M_x with exact rational entries. Pairs without an
// explicit row default to the identity row (noiseless).
class noise_model {
public:
  noise_model() = default;

  // Throws noise_error if the row is invalid (bad entries or sum != 1).
  void set_row(const name& channel, const name& input, noise_row row);
  bool has_row(const name& channel, const name& input) const;

  // Explicit row if present, else the identity row on `input`.
  noise_row row(const name& channel, const name& input) const;

  const std::map<std::pair<name, name>, noise_row>& rows() const { return rows_; }
  bool is_noiseless() const { return rows_.empty(); }

  // Every name mentioned anywhere: channels, inputs, support members.
  name_set mentioned_names() const;

  // Channels x where some row p_x(y|y) = 0 drops the sent name entirely;
  // such models make fn*(P) lose free names (flagged in diagnostics).
  std::vector<std::pair<name, name>> rows_dropping_input() const;

private:
  std::map<std::pair<name, name>, noise_row> rows_;
};

// File format, one row per line (channel keyword optional):
//   channel x : y -> { y: 7/10, z: 1/10, s: 1/10, t: 1/10 }
// '#' starts a comment; probabilities are rationals or exact decimals.
noise_model load_noise_model(const std::string& text);
std::string render_noise_model(const noise_model& nm);

noise_row noise_row_of(const noise_model& nm, const name& channel, const name& input);

// sigma is consistent with the weakly bound names of p iff
// z.sigma in wbn(p.sigma) implies z not in fn*(p).
bool is_consistent(const substitution& s, const proc& p, const noise_model& nm);

// sigma is compatible with channel x iff pushing each row
// p_x(.|y) forward through sigma gives the row p_{x.sigma}(.|y.sigma).
bool is_compatible(const substitution& s, const name& channel, const noise_model& nm);

} // namespace pin
