#pragma once

#include "pin/noise.hpp"
#include "pin/process.hpp"

namespace pin {

// Noisy free names fn*(P): free names closed under the names noise can
// substitute for emitted data. The infinite union in the input clause is
// evaluated over a finite probe set (names mentioned by the model, names of
// P, and one fresh representative), outside which the value is constant.
name_set noisy_free_names(const proc& p, const noise_model& nm);

struct normalization_options {
  // (nu z)(P|Q) -> P|(nu z)Q when z not in fn*(P). Sound for barbed-style
  // matching but not for bisimilarity: pulling a parallel component out of a
  // restriction changes which inputs discharge it via Open-Inp. State
  // identity in the LTS therefore uses the rigid variant.
  bool scope_minimization = true;
  // Match axioms: [x=x]pi.P -> pi.P always; [x=y]pi.P -> 0 when x and y are
  // distinct and neither is bound by an enclosing input binder (names bound
  // by an input can still be instantiated to equal names).
  bool match_axioms = true;
};

// Directed rewriting to a canonical form: canonical renaming of input
// binders to "#k", sum/par flattening with 0-elimination and canonical
// sorting, restriction dropping/sorting, match-guard resolution, and (in the
// full variant) scope minimization. Axiom !P == P|!P is never applied.
proc structural_normal_form(const proc& p, const noise_model& nm,
                            const normalization_options& opts = {});

// The variant used for LTS state identity: every rewrite it performs
// preserves bisimilarity.
proc rigid_normal_form(const proc& p, const noise_model& nm);

// True iff full normal forms coincide. Sound; not complete for the whole
// congruence (replication unfolding is never applied, and dead matches under
// are kept).
bool structurally_congruent(const proc& p, const proc& q, const noise_model& nm);

} // namespace pin
