#pragma once

#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "pin/name.hpp"

namespace pin {

// ---------------------------------------------------------------------------
// Abstract syntax. Processes are immutable and shared; every operation on
// them is pure.
// ---------------------------------------------------------------------------

struct match_guard {
  name left, right;
  auto operator<=>(const match_guard&) const = default;
};

struct tau_core {
  auto operator<=>(const tau_core&) const = default;
};
struct output_core {
  name channel, datum; // channel!datum
  auto operator<=>(const output_core&) const = default;
};
struct input_core {
  name channel, binder; // channel?(binder), binder strongly bound in the body
  auto operator<=>(const input_core&) const = default;
};
using prefix_core = std::variant<tau_core, output_core, input_core>;

// A prefix is a (possibly empty) chain of match guards around a core.
struct prefix {
  std::vector<match_guard> guards;
  prefix_core core;
};

class process;
using proc = std::shared_ptr<const process>;

struct nil_node {};
struct prefix_node {
  prefix pfx;
  proc body;
};
struct sum_node {
  proc left, right;
};
struct par_node {
  proc left, right;
};
struct nu_node {
  name binder; // weakly bound: never alpha-convertible
  proc body;
};
struct bang_node {
  proc body;
};

class process {
public:
  using node_t = std::variant<nil_node, prefix_node, sum_node, par_node, nu_node, bang_node>;
  node_t node;
  explicit process(node_t n) : node(std::move(n)) {}
};

// Constructors.
proc make_nil();
proc make_prefixed(prefix pfx, proc body);
proc make_sum(proc left, proc right);
proc make_par(proc left, proc right);
proc make_nu(name binder, proc body);
proc make_bang(proc body);

// Convenience builders (body defaults to 0).
proc p_out(name channel, name datum, proc body = make_nil());
proc p_in(name channel, name binder, proc body = make_nil());
proc p_tau(proc body = make_nil());
proc p_match(name left, name right, proc prefixed); // wraps the outer prefix of `prefixed`

bool is_nil(const proc& p);
bool is_summation(const proc& p); // Nil, prefixed, or Sum — legal as a sum operand

// Total structural order on terms; names literal.
int compare(const proc& a, const proc& b);
bool equal(const proc& a, const proc& b);

// Total order modulo strong alpha-conversion: occurrences bound by an input
// binder compare positionally, everything else (including restriction
// binders) compares by literal name.
int compare_alpha(const proc& a, const proc& b);
bool equal_alpha(const proc& a, const proc& b);

// As compare_alpha, with both terms read under the same stack of enclosing
// input binders (outermost first); occurrences they bind compare by level.
int compare_alpha_under(const proc& a, const proc& b, const std::map<name, int>& enclosing,
                        int depth);

// Canonical text; parse_process(render_process(p)) == p.
std::string render_process(const proc& p);
std::string render_prefix(const prefix& pfx);

// Flattened views (left-assoc chains flattened to component lists).
std::vector<proc> sum_components(const proc& p);
std::vector<proc> par_components(const proc& p);

// --- name analysis --------------------------------------------------------

// Names with at least one free occurrence.
name_set free_names(const proc& p);
// Names bound by some input prefix x(z) anywhere in the term.
name_set strongly_bound_names(const proc& p);
// Bound names that are not strongly bound.
name_set weakly_bound_names(const proc& p);
name_set bound_names(const proc& p);
name_set all_names(const proc& p);
// Names with a substitutable occurrence: free occurrences plus everything a
// restriction binds (substitution renames those along with their binder).
name_set substitutable_names(const proc& p);

struct name_classification {
  name_set free;
  name_set strongly_bound;
  name_set weakly_bound;
};
name_classification classify_names(const proc& p);

} // namespace pin
