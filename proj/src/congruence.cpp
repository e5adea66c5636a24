#include "pin/congruence.hpp"

#include <algorithm>
#include <cassert>
#include <functional>

#include "pin/subst.hpp"

namespace pin {

// ---------------------------------------------------------------------------
// Noisy free names.
// ---------------------------------------------------------------------------

namespace {

name_set fnstar_rec(const proc& p, const noise_model& nm);

name_set fnstar_prefix(const prefix& pfx, const proc& body, const noise_model& nm) {
  name_set out;
  for (const auto& g : pfx.guards) {
    out.insert(g.left);
    out.insert(g.right);
  }
  if (const auto* o = std::get_if<output_core>(&pfx.core)) {
    out.insert(o->channel);
    for (const auto& [received, prob] : nm.row(o->channel, o->datum).support) out.insert(received);
    auto rest = fnstar_rec(body, nm);
    out.insert(rest.begin(), rest.end());
  } else if (const auto* i = std::get_if<input_core>(&pfx.core)) {
    out.insert(i->channel);
    // The union over all possible received names collapses to a finite probe
    // set: outside the names the model mentions and the names of the body,
    // every instantiation behaves like one fresh representative.
    name_set probe = nm.mentioned_names();
    name_set body_names = all_names(body);
    probe.insert(body_names.begin(), body_names.end());
    name_set avoid = probe;
    avoid.insert(i->channel);
    avoid.insert(i->binder);
    probe.insert(fresh_name(avoid));
    for (const auto& y : probe) {
      proc instantiated = apply_substitution(body, substitution::single(i->binder, y));
      name_set inner = fnstar_rec(instantiated, nm);
      inner.erase(y);
      out.insert(inner.begin(), inner.end());
    }
  } else {
    auto rest = fnstar_rec(body, nm);
    out.insert(rest.begin(), rest.end());
  }
  return out;
}

name_set fnstar_rec(const proc& p, const noise_model& nm) {
  return std::visit(
      [&](const auto& node) -> name_set {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, nil_node>) {
          return {};
        } else if constexpr (std::is_same_v<T, prefix_node>) {
          return fnstar_prefix(node.pfx, node.body, nm);
        } else if constexpr (std::is_same_v<T, sum_node> || std::is_same_v<T, par_node>) {
          name_set out = fnstar_rec(node.left, nm);
          auto rhs = fnstar_rec(node.right, nm);
          out.insert(rhs.begin(), rhs.end());
          return out;
        } else if constexpr (std::is_same_v<T, nu_node>) {
          name_set out = fnstar_rec(node.body, nm);
          out.erase(node.binder);
          return out;
        } else {
          return fnstar_rec(node.body, nm);
        }
      },
      p->node);
}

} // namespace

name_set noisy_free_names(const proc& p, const noise_model& nm) { return fnstar_rec(p, nm); }

// ---------------------------------------------------------------------------
// Structural normal forms.
// ---------------------------------------------------------------------------

namespace {

// Scope of enclosing input binders: membership decides which match guards
// are still instantiable, levels make component sorting invariant under the
// final canonical renaming.
struct binder_scope {
  std::map<name, int> input_levels;
  int depth = 0;

  bool strongly_bound(const name& n) const { return input_levels.count(n) > 0; }
  binder_scope with_input(const name& n) const {
    binder_scope inner = *this;
    inner.input_levels[n] = inner.depth++;
    return inner;
  }
  // Rename-invariant key for sorting restriction binders.
  std::pair<int, std::string> binder_key(const name& n) const {
    auto it = input_levels.find(n);
    if (it != input_levels.end()) return {it->second, ""};
    return {depth, n.id};
  }
};

struct normalizer {
  const noise_model& nm;
  normalization_options opts;

  proc assoc(std::vector<proc> comps, bool is_sum) {
    if (comps.empty()) return make_nil();
    proc acc = comps.front();
    for (size_t i = 1; i < comps.size(); ++i)
      acc = is_sum ? make_sum(acc, comps[i]) : make_par(acc, comps[i]);
    return acc;
  }

  void sort_canonical(std::vector<proc>& comps, const binder_scope& scope) {
    std::stable_sort(comps.begin(), comps.end(), [&](const proc& a, const proc& b) {
      return compare_alpha_under(a, b, scope.input_levels, scope.depth) < 0;
    });
  }

  proc nf(const proc& p, const binder_scope& scope) {
    return std::visit(
        [&](const auto& node) -> proc {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, nil_node>) {
            return make_nil();
          } else if constexpr (std::is_same_v<T, prefix_node>) {
            prefix pfx;
            pfx.core = node.pfx.core;
            for (const auto& g : node.pfx.guards) {
              if (opts.match_axioms) {
                if (g.left == g.right) continue; // [x=x]pi.P == pi.P
                if (!scope.strongly_bound(g.left) && !scope.strongly_bound(g.right))
                  return make_nil(); // [x=y]pi.P == 0: names fixed, guard dead
              }
              pfx.guards.push_back(g);
            }
            if (const auto* i = std::get_if<input_core>(&pfx.core))
              return make_prefixed(std::move(pfx), nf(node.body, scope.with_input(i->binder)));
            return make_prefixed(std::move(pfx), nf(node.body, scope));
          } else if constexpr (std::is_same_v<T, sum_node>) {
            std::vector<proc> comps;
            for (const auto& c : sum_components(p)) {
              proc q = nf(c, scope);
              if (!is_nil(q)) comps.push_back(q);
            }
            if (comps.empty()) return make_nil();
            sort_canonical(comps, scope);
            return assoc(std::move(comps), true);
          } else if constexpr (std::is_same_v<T, par_node>) {
            std::vector<proc> comps;
            for (const auto& c : par_components(p)) {
              proc q = nf(c, scope);
              // Scope minimization may split a component into a parallel.
              for (const auto& sub : par_components(q))
                if (!is_nil(sub)) comps.push_back(sub);
            }
            if (comps.empty()) return make_nil();
            if (comps.size() == 1) return comps.front();
            sort_canonical(comps, scope);
            return assoc(std::move(comps), false);
          } else if constexpr (std::is_same_v<T, nu_node>) {
            return rebuild_nu(node.binder, nf(node.body, scope), scope);
          } else {
            return make_bang(nf(node.body, scope));
          }
        },
        p->node);
  }

  // body is already in normal form. fn*-based rewrites are only valid when
  // no enclosing input binder can reshape the term: an instantiation renames
  // a shadowed binder outright, and any input-bound name in the body can be
  // instantiated into (or captured by) the restriction.
  proc rebuild_nu(const name& binder, const proc& body, const binder_scope& scope) {
    if (is_nil(body)) return make_nil(); // (nu z)0 == 0
    bool frozen = scope.strongly_bound(binder);
    if (!frozen && !scope.input_levels.empty()) {
      name_set names = substitutable_names(body);
      for (const auto& [n, level] : scope.input_levels) {
        if (names.count(n)) {
          frozen = true;
          break;
        }
      }
    }
    if (!frozen) {
      if (!noisy_free_names(body, nm).count(binder)) return body; // derived: (nu z)P == P
      if (opts.scope_minimization && std::holds_alternative<par_node>(body->node)) {
        std::vector<proc> keep, under;
        for (const auto& c : par_components(body)) {
          if (noisy_free_names(c, nm).count(binder))
            under.push_back(c);
          else
            keep.push_back(c);
        }
        if (!keep.empty()) {
          proc inner = rebuild_nu(binder, assoc(std::move(under), false), scope);
          for (const auto& sub : par_components(inner)) keep.push_back(sub);
          sort_canonical(keep, scope);
          return assoc(std::move(keep), false);
        }
      }
    }
    if (const auto* inner = std::get_if<nu_node>(&body->node)) {
      if (scope.binder_key(inner->binder) < scope.binder_key(binder)) {
        proc swapped = rebuild_nu(binder, inner->body, scope);
        return rebuild_nu(inner->binder, swapped, scope);
      }
    }
    return make_nu(binder, body);
  }
};

// Canonical renaming of input binders to "#0", "#1", ... in preorder. The
// environment substitutes occurrences with correct shadowing; collisions are
// impossible because internal names occur only as input binders.
proc canonical_rename(const proc& p, int& counter, const std::map<name, name>& env) {
  return std::visit(
      [&](const auto& node) -> proc {
        using T = std::decay_t<decltype(node)>;
        auto subst = [&env](const name& n) {
          auto it = env.find(n);
          return it == env.end() ? n : it->second;
        };
        if constexpr (std::is_same_v<T, nil_node>) {
          return p;
        } else if constexpr (std::is_same_v<T, prefix_node>) {
          prefix pfx = node.pfx;
          for (auto& g : pfx.guards) {
            g.left = subst(g.left);
            g.right = subst(g.right);
          }
          if (auto* o = std::get_if<output_core>(&pfx.core)) {
            o->channel = subst(o->channel);
            o->datum = subst(o->datum);
            return make_prefixed(std::move(pfx), canonical_rename(node.body, counter, env));
          }
          if (auto* i = std::get_if<input_core>(&pfx.core)) {
            i->channel = subst(i->channel);
            name fresh = internal_name(counter++);
            auto inner = env;
            inner[i->binder] = fresh;
            i->binder = fresh;
            return make_prefixed(std::move(pfx), canonical_rename(node.body, counter, inner));
          }
          return make_prefixed(std::move(pfx), canonical_rename(node.body, counter, env));
        } else if constexpr (std::is_same_v<T, sum_node>) {
          return make_sum(canonical_rename(node.left, counter, env),
                          canonical_rename(node.right, counter, env));
        } else if constexpr (std::is_same_v<T, par_node>) {
          return make_par(canonical_rename(node.left, counter, env),
                          canonical_rename(node.right, counter, env));
        } else if constexpr (std::is_same_v<T, nu_node>) {
          // A restriction binder shadowed by an enclosing input binder is
          // renamed with it, exactly as the substitution would rewrite it.
          return make_nu(subst(node.binder), canonical_rename(node.body, counter, env));
        } else {
          return make_bang(canonical_rename(node.body, counter, env));
        }
      },
      p->node);
}

} // namespace

proc structural_normal_form(const proc& p, const noise_model& nm,
                            const normalization_options& opts) {
  normalizer n{nm, opts};
  proc q = n.nf(p, binder_scope{});
  int counter = 0;
  return canonical_rename(q, counter, {});
}

proc rigid_normal_form(const proc& p, const noise_model& nm) {
  normalization_options opts;
  opts.scope_minimization = false;
  opts.match_axioms = true;
  return structural_normal_form(p, nm, opts);
}

bool structurally_congruent(const proc& p, const proc& q, const noise_model& nm) {
  return equal(structural_normal_form(p, nm), structural_normal_form(q, nm));
}

} // namespace pin
