#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pin/congruence.hpp"
#include "pin/noise.hpp"
#include "pin/process.hpp"
#include "pin/rational.hpp"
#include "pin/subst.hpp"

namespace pin {

// ---------------------------------------------------------------------------
// Actions and barbs (early semantics).
// ---------------------------------------------------------------------------

enum class action_kind { tau, input, free_output, bound_output };

struct action {
  action_kind kind = action_kind::tau;
  name subject, object; // empty for tau

  static action make_tau();
  static action make_input(name subject, name object);
  static action make_free_output(name subject, name object);
  static action make_bound_output(name subject, name object);

  bool is_output() const {
    return kind == action_kind::free_output || kind == action_kind::bound_output;
  }
  auto operator<=>(const action&) const = default;
};

std::string render_action(const action& a); // tau | x?y | x!y | x!(y)
name_set action_names(const action& a);
action apply_substitution(const action& a, const substitution& s);

enum class barb_kind { tau, input, output };
struct barb {
  barb_kind kind = barb_kind::tau;
  name subject; // empty for tau
  auto operator<=>(const barb&) const = default;
};
barb barb_of(const action& a);
std::string render_barb(const barb& b); // tau | x? | x!

// ---------------------------------------------------------------------------
// Single early transitions.
// ---------------------------------------------------------------------------

struct transition {
  action act;
  rational prob;
  proc target;
};
int compare(const transition& a, const transition& b);

// Transitions derivable from the early rules, with visible input objects
// restricted to `inst`. Communication instantiates the inputs it needs
// internally, independent of `inst`.
std::vector<transition> early_transitions(const proc& p, const noise_model& nm,
                                          const name_set& inst);

// ---------------------------------------------------------------------------
// Transition groups: transitions bundled by derivation.
// ---------------------------------------------------------------------------

enum class rule_tag {
  out, inp, tau_act, mat, sum_l, sum_r, par_l, par_r,
  comm_l, comm_r, res_out, res_inp, res_tau, open_inp, rep_act, rep_comm
};
std::string render_rule(rule_tag t);

struct group_branch {
  action act;
  rational prob;
  proc target;
};

// One derivation's worth of transitions: branches share a barb and their
// probabilities sum to exactly 1. Nondeterminism lives between groups.
struct transition_group {
  proc source;
  std::vector<group_branch> branches; // sorted by (action, target), merged
  rule_tag tag = rule_tag::out;       // concluding rule of the derivation
  bool used_replication = false;      // some Rep rule fired in the derivation
  std::vector<proc> derivation_processes; // every process in the inference
  std::vector<name> derivation_output_subjects;
};

std::vector<transition_group> transition_groups(const proc& p, const noise_model& nm,
                                                const name_set& inst);

// The merge operator: branches with identical (action, target) have their
// probabilities added. Throws std::logic_error if the operands carry
// different barbs (an engine bug, never a user error).
std::vector<group_branch> group_union(const std::vector<group_branch>& g1,
                                      const std::vector<group_branch>& g2);

// Common barb of all branches; throws std::logic_error on a mixed group.
barb barb_of_group(const transition_group& g);

// Non-tau barbs: In(a) iff some input group has subject a, Out(a) iff some
// output group has subject a.
std::set<barb> observables(const proc& p, const noise_model& nm, const name_set& inst);

// The image of a group under a substitution that is consistent
// with the weakly bound names of every process in the derivation and
// compatible with its output subjects. Throws std::invalid_argument naming
// the violated condition otherwise.
transition_group substituted_group(const transition_group& g, const substitution& s,
                                   const noise_model& nm);

std::string render_group(const transition_group& g);

// Default input-instantiation set for a query: fn*(roots) + free names +
// weakly bound names (Open-Inp objects are not covered by a fresh
// representative) + one fresh canonical name.
name_set default_instantiation(const std::vector<proc>& roots, const noise_model& nm);

// ---------------------------------------------------------------------------
// Late semantics (alternate stepping mode).
// ---------------------------------------------------------------------------

enum class late_action_kind { tau, input, free_output, bound_output };
struct late_action {
  late_action_kind kind = late_action_kind::tau;
  name subject;
  name object; // input: the placeholder binder x(z)
  auto operator<=>(const late_action&) const = default;
};
std::string render_late_action(const late_action& a);

struct late_transition {
  late_action act;
  rational prob;
  proc target;
};
int compare(const late_transition& a, const late_transition& b);

std::vector<late_transition> late_transitions(const proc& p, const noise_model& nm);

} // namespace pin
