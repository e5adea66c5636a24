#pragma once

#include <stdexcept>
#include <string>

#include "pin/process.hpp"

namespace pin {

// Parse errors carry a 1-based position. Sum-grammar violations (a parallel
// or replicated term used as a sum operand) are reported with their own kind
// so callers can distinguish them from plain syntax errors.
struct parse_error : std::runtime_error {
  enum class kind_t { syntax, sum_grammar };
  kind_t kind;
  int line, column;
  parse_error(kind_t k, int line, int column, const std::string& what);
};

// Grammar (whitespace-insensitive):
//   proc    := sum | par
//   par     := atom ("|" atom)*
//   sum     := guarded ("+" guarded)*
//   guarded := "0" | prefix "." atom
//   atom    := "0" | prefix "." atom | "(" proc ")" | "(nu" name ")" atom | "!" atom
//   prefix  := name "!" name | name "?(" name ")" | "tau" | "[" name "=" name "]" prefix
// A trailing ".0" may be elided after a prefix.
proc parse_process(const std::string& text);

} // namespace pin
