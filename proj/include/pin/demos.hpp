#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pin/equivalence.hpp"

namespace pin {

// The classic counter-examples that establish the strictness of the
// equivalence hierarchy under noise, runnable as one batch with
// expected-vs-computed verdicts.

struct demo_row {
  std::string id;
  std::string description;
  std::string expected;
  std::string computed;
  bool pass = false;
};

struct demo_result {
  std::vector<demo_row> rows;
  bool all_pass = true;
};

struct demo_options {
  // Replaces the channel matrix used by the guarded-input rows; the demo is
  // expected to flag mismatches when the matrix is wrong.
  std::optional<noise_model> guarded_pair_noise_override;
};

std::vector<std::pair<std::string, std::string>> demo_list();
demo_result run_demo(const demo_options& opts = {});
std::string render_demo(const demo_result& r);

} // namespace pin
