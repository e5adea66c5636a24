#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "pin/lts.hpp"
#include "pin/semantics.hpp"

namespace pin {

// ---------------------------------------------------------------------------
// Process contexts, composed from the elementary ones to bounded depth.
// ---------------------------------------------------------------------------

struct ctx_prefix { prefix pfx; };      // pi.[ ]   (the + M summand is 0)
struct ctx_par_left { proc right; };    // [ ] | P
struct ctx_par_right { proc left; };    // P | [ ]
struct ctx_nu { name binder; };         // (nu z)[ ]
struct ctx_bang {};                     // ![ ]
using context_layer = std::variant<ctx_prefix, ctx_par_left, ctx_par_right, ctx_nu, ctx_bang>;

// Layers innermost-first: apply wraps the hole with layers[0] first.
struct context {
  std::vector<context_layer> layers;
};

proc apply_context(const context& c, const proc& hole);
std::string render_context(const context& c);

// All compositions of elementary contexts up to `depth`, with prefixes and
// parallel ingredient processes drawn from a canonical family over the
// ingredient names. Deterministic enumeration order; depth 0 is the hole.
std::vector<context> generate_contexts(const name_set& ingredients, int depth);

// Canonical tester family for bounded barbed equivalence: prefix chains of
// length <= 2 over the ingredient names plus restricted emitters.
std::vector<proc> default_testers(const name_set& ingredients);
name_set default_equivalence_ingredients(const proc& p, const proc& q, const noise_model& nm);

// ---------------------------------------------------------------------------
// Verdicts.
// ---------------------------------------------------------------------------

enum class verdict_status { equivalent, not_equivalent, equivalent_up_to_family };

struct verdict {
  verdict_status status = verdict_status::equivalent;
  bool truncated = false;
  std::optional<int> level; // stratification level separating the states
  std::optional<action> witness_action;
  std::optional<proc> witness_tester;
  std::optional<context> witness_context;
  std::optional<substitution> witness_substitution;
  std::string note;

  bool equivalent() const { return status != verdict_status::not_equivalent; }
};

std::string render_verdict(const std::string& relation, const verdict& v);

// ---------------------------------------------------------------------------
// Partition refinement.
// ---------------------------------------------------------------------------

enum class eq_mode { reduction, barbed, bisim };

struct partition {
  std::vector<int> block_of; // block id per state
  int rounds = 0;            // refinement rounds performed
  bool stable = false;
  bool same_block(int a, int b) const { return block_of[a] == block_of[b]; }
  int block_count() const;
};

// Rounds of signature refinement from the universal partition; max_rounds < 0
// refines to the fixpoint (<= |states| rounds).
partition refine_partition(const plts& l, eq_mode mode, int max_rounds = -1);

// Largest bisimulation via refinement to fixpoint; witness records the
// separating stratification level and a distinguishing group action.
verdict bisimilar(const plts& l, int a, int b);
verdict reduction_bisimilar(const plts& l, int a, int b);
verdict barbed_bisimilar(const plts& l, int a, int b);

// Membership in ~_n (n refinement rounds; ~_0 is universal).
bool stratified_bisimilar(const plts& l, int a, int b, int n);

// ---------------------------------------------------------------------------
// Bounded quantifier checks. Refutations are unconditional; confirmations
// are only "up to the family".
// ---------------------------------------------------------------------------

struct bound_options {
  int rep_budget = 2;
  int max_states = 10000;
};

verdict barbed_equivalent_bounded(const proc& p, const proc& q, const noise_model& nm,
                                  const std::vector<proc>& testers,
                                  const bound_options& opts = {});

verdict barbed_congruent_bounded(const proc& p, const proc& q, const noise_model& nm,
                                 const std::vector<context>& contexts,
                                 const bound_options& opts = {});

// Enumerates every substitution fn(p) u fn(q) -> universe and checks
// bisimilarity of the instantiated pair.
verdict full_bisimilar_bounded(const proc& p, const proc& q, const noise_model& nm,
                               const name_set& universe, const bound_options& opts = {});
name_set default_substitution_universe(const proc& p, const proc& q);

// Checks that `pairs` (with its symmetric closure) is a
// bisimulation up to ~ on l. Rejects truncated systems.
bool check_bisimulation_up_to(const plts& l, const std::vector<std::pair<int, int>>& pairs);

// ---------------------------------------------------------------------------
// Hierarchy report.
// ---------------------------------------------------------------------------

struct hierarchy_bounds {
  int context_depth = 2;
  std::optional<name_set> universe;         // substitution universe override
  std::optional<std::vector<proc>> testers; // tester family override
  bound_options limits;
};

struct hierarchy_row {
  std::string relation;
  verdict v;
};

struct hierarchy_result {
  std::vector<hierarchy_row> rows; // reduction, barbed, barbed-equiv, barbed-cong, bisim, full-bisim
  bool arrows_consistent = true;   // no verdict pair violates the hierarchy
  std::string violation;
};

hierarchy_result hierarchy_report(const proc& p, const proc& q, const noise_model& nm,
                                  const hierarchy_bounds& bounds = {});
std::string render_hierarchy(const hierarchy_result& r);

} // namespace pin
