#include "pin/equivalence.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace pin {

// ---------------------------------------------------------------------------
// Contexts.
// ---------------------------------------------------------------------------

proc apply_context(const context& c, const proc& hole) {
  proc acc = hole;
  for (const auto& layer : c.layers) {
    acc = std::visit(
        [&](const auto& l) -> proc {
          using T = std::decay_t<decltype(l)>;
          if constexpr (std::is_same_v<T, ctx_prefix>)
            return make_prefixed(l.pfx, acc);
          else if constexpr (std::is_same_v<T, ctx_par_left>)
            return make_par(acc, l.right);
          else if constexpr (std::is_same_v<T, ctx_par_right>)
            return make_par(l.left, acc);
          else if constexpr (std::is_same_v<T, ctx_nu>)
            return make_nu(l.binder, acc);
          else
            return make_bang(acc);
        },
        layer);
  }
  return acc;
}

std::string render_context(const context& c) {
  std::string acc = "[ ]";
  for (const auto& layer : c.layers) {
    acc = std::visit(
        [&](const auto& l) -> std::string {
          using T = std::decay_t<decltype(l)>;
          if constexpr (std::is_same_v<T, ctx_prefix>)
            return render_prefix(l.pfx) + ".(" + acc + ")";
          else if constexpr (std::is_same_v<T, ctx_par_left>)
            return "(" + acc + ") | " + render_process(l.right);
          else if constexpr (std::is_same_v<T, ctx_par_right>)
            return render_process(l.left) + " | (" + acc + ")";
          else if constexpr (std::is_same_v<T, ctx_nu>)
            return "(nu " + l.binder.id + ") (" + acc + ")";
          else
            return "!(" + acc + ")";
        },
        layer);
  }
  return acc;
}

namespace {

std::vector<prefix> simple_prefixes(const name_set& ingredients) {
  std::vector<prefix> out;
  out.push_back(prefix{{}, tau_core{}});
  for (const auto& a : ingredients)
    for (const auto& b : ingredients) out.push_back(prefix{{}, output_core{a, b}});
  for (const auto& a : ingredients)
    for (const auto& b : ingredients) out.push_back(prefix{{}, input_core{a, b}});
  return out;
}

std::vector<proc> output_chains(const name_set& ingredients, bool same_channel_pairs) {
  std::vector<proc> out;
  for (const auto& a : ingredients)
    for (const auto& b : ingredients) out.push_back(p_out(a, b));
  if (same_channel_pairs) {
    for (const auto& a : ingredients)
      for (const auto& b : ingredients)
        for (const auto& c : ingredients) out.push_back(p_out(a, b, p_out(a, c)));
  } else {
    for (const auto& a : ingredients)
      for (const auto& b : ingredients)
        for (const auto& c : ingredients)
          for (const auto& d : ingredients) out.push_back(p_out(a, b, p_out(c, d)));
  }
  return out;
}

} // namespace

std::vector<context> generate_contexts(const name_set& ingredients, int depth) {
  // Elementary layers: pi.[ ] over the simple prefixes, [ ]|E and E|[ ] over
  // emitter/receiver ingredient processes, (nu z)[ ], and ![ ].
  std::vector<context_layer> elementary;
  for (const auto& pfx : simple_prefixes(ingredients)) elementary.push_back(ctx_prefix{pfx});
  std::vector<proc> ingredients_procs;
  for (const auto& pfx : simple_prefixes(ingredients))
    ingredients_procs.push_back(make_prefixed(pfx, make_nil()));
  for (const auto& e : output_chains(ingredients, true)) {
    bool single = std::holds_alternative<nil_node>(
        std::get<prefix_node>(e->node).body->node);
    if (!single) ingredients_procs.push_back(e); // length-2 emitter chains
  }
  {
    // Restricted emitters (nu z) over names occurring in the chain.
    std::vector<proc> restricted;
    for (const auto& e : ingredients_procs) {
      for (const auto& z : all_names(e)) restricted.push_back(make_nu(z, e));
    }
    ingredients_procs.insert(ingredients_procs.end(), restricted.begin(), restricted.end());
  }
  for (const auto& e : ingredients_procs) {
    elementary.push_back(ctx_par_left{e});
    elementary.push_back(ctx_par_right{e});
  }
  for (const auto& z : ingredients) elementary.push_back(ctx_nu{z});
  elementary.push_back(ctx_bang{});

  // Hole-guarding layers are the useful inner compositions; pairing every
  // elementary layer with every other explodes without adding coverage.
  std::vector<context_layer> guarding;
  for (const auto& pfx : simple_prefixes(ingredients)) guarding.push_back(ctx_prefix{pfx});
  for (const auto& z : ingredients) guarding.push_back(ctx_nu{z});
  guarding.push_back(ctx_bang{});

  std::vector<context> out;
  out.push_back(context{}); // depth 0: the hole
  if (depth >= 1)
    for (const auto& e : elementary) out.push_back(context{{e}});
  if (depth >= 2) {
    for (const auto& inner : guarding)
      for (const auto& outer : elementary) out.push_back(context{{inner, outer}});
  }
  for (int d = 3; d <= depth; ++d) {
    std::vector<context> next;
    for (const auto& c : out)
      if (static_cast<int>(c.layers.size()) == d - 1)
        for (const auto& outer : guarding) {
          context e = c;
          e.layers.push_back(outer);
          next.push_back(std::move(e));
        }
    out.insert(out.end(), next.begin(), next.end());
  }
  return out;
}

std::vector<proc> default_testers(const name_set& ingredients) {
  std::vector<proc> out;
  auto prefixes = simple_prefixes(ingredients);
  std::vector<proc> chains;
  for (const auto& p1 : prefixes) chains.push_back(make_prefixed(p1, make_nil()));
  for (const auto& p1 : prefixes)
    for (const auto& p2 : prefixes)
      chains.push_back(make_prefixed(p1, make_prefixed(p2, make_nil())));
  out = chains;
  // Restricted emitters: single and double restrictions over output-only
  // chains, enough to produce every free/bound output shape.
  auto is_output_chain = [](const proc& p) {
    proc q = p;
    while (const auto* node = std::get_if<prefix_node>(&q->node)) {
      if (!std::holds_alternative<output_core>(node->pfx.core)) return false;
      q = node->body;
    }
    return is_nil(q);
  };
  for (const auto& c : chains) {
    if (!is_output_chain(c)) continue;
    for (const auto& z : ingredients) out.push_back(make_nu(z, c));
  }
  for (const auto& c : chains) {
    if (!is_output_chain(c)) continue;
    const auto* node = std::get_if<prefix_node>(&c->node);
    if (!is_nil(node->body)) continue; // double restrictions on 1-chains only
    for (const auto& z : ingredients)
      for (const auto& w : ingredients)
        if (z < w) out.push_back(make_nu(z, make_nu(w, c)));
  }
  return out;
}

name_set default_equivalence_ingredients(const proc& p, const proc& q, const noise_model& nm) {
  name_set out = free_names(p);
  auto fq = free_names(q);
  out.insert(fq.begin(), fq.end());
  auto mentioned = nm.mentioned_names();
  out.insert(mentioned.begin(), mentioned.end());
  name_set avoid = out;
  auto ap = all_names(p);
  auto aq = all_names(q);
  avoid.insert(ap.begin(), ap.end());
  avoid.insert(aq.begin(), aq.end());
  out.insert(fresh_name(avoid));
  return out;
}

// ---------------------------------------------------------------------------
// Partition refinement.
// ---------------------------------------------------------------------------

int partition::block_count() const {
  return block_of.empty() ? 0 : *std::max_element(block_of.begin(), block_of.end()) + 1;
}

namespace {

// Canonical signature of one state w.r.t. the current partition. Group
// measures are compared as sets (duplicate-measure groups collapse): the
// definitions only demand a matching eta for each mu.
std::string state_signature(const plts& l, int s, const std::vector<int>& block_of, eq_mode mode) {
  std::set<std::string> measures;
  std::set<std::string> barbs;
  for (const auto& g : l.states[s].groups) {
    barb b = barb_of(g.branches.front().act);
    if (b.kind != barb_kind::tau) barbs.insert(render_barb(b));
    if (mode != eq_mode::bisim && b.kind != barb_kind::tau) continue;
    // mu(alpha, C): accumulate branch probabilities per (action, block).
    std::map<std::pair<std::string, int>, rational> measure;
    for (const auto& br : g.branches) {
      std::string key = mode == eq_mode::bisim ? render_action(br.act) : "tau";
      measure[{key, block_of[br.target]}] += br.prob;
    }
    std::ostringstream m;
    for (const auto& [k, prob] : measure)
      m << k.first << "@" << k.second << "=" << to_string(prob) << ";";
    measures.insert(m.str());
  }
  std::ostringstream out;
  if (mode == eq_mode::barbed) {
    out << "barbs:";
    for (const auto& b : barbs) out << b << ",";
  }
  out << "|";
  for (const auto& m : measures) out << m << "#";
  return out.str();
}

bool refine_round(const plts& l, std::vector<int>& block_of, eq_mode mode) {
  std::map<std::pair<int, std::string>, int> fresh;
  std::vector<int> next(block_of.size());
  for (int s = 0; s < l.state_count(); ++s) {
    auto key = std::make_pair(block_of[s], state_signature(l, s, block_of, mode));
    auto [it, inserted] = fresh.emplace(key, static_cast<int>(fresh.size()));
    next[s] = it->second;
  }
  // Each new block refines an old one, so the partition changed iff the
  // block count grew.
  std::set<int> old_blocks(block_of.begin(), block_of.end());
  std::set<int> new_blocks(next.begin(), next.end());
  bool changed = new_blocks.size() != old_blocks.size();
  block_of = std::move(next);
  return changed;
}

} // namespace

partition refine_partition(const plts& l, eq_mode mode, int max_rounds) {
  partition p;
  p.block_of.assign(l.state_count(), 0);
  int limit = max_rounds < 0 ? l.state_count() + 1 : max_rounds;
  for (int round = 0; round < limit; ++round) {
    if (!refine_round(l, p.block_of, mode)) {
      p.stable = true;
      break;
    }
    ++p.rounds;
  }
  if (max_rounds < 0 && !p.stable) {
    // Fixpoint must land within |states| rounds; one extra confirms it.
    p.stable = !refine_round(l, p.block_of, mode);
    assert(p.stable);
  }
  return p;
}

namespace {

void validate_state(const plts& l, int s) {
  if (s < 0 || s >= l.state_count())
    throw std::out_of_range("state index " + std::to_string(s) + " outside plts of size " +
                            std::to_string(l.state_count()));
}

// Finds the first distinguishing group action when a and b separate.
std::optional<action> distinguishing_action(const plts& l, int a, int b,
                                            const std::vector<int>& prev_blocks, eq_mode mode) {
  auto measures_of = [&](int s) {
    std::map<std::string, action> reps;
    for (const auto& g : l.states[s].groups) {
      barb bb = barb_of(g.branches.front().act);
      if (mode != eq_mode::bisim && bb.kind != barb_kind::tau) continue;
      std::map<std::pair<std::string, int>, rational> measure;
      for (const auto& br : g.branches) {
        std::string key = mode == eq_mode::bisim ? render_action(br.act) : "tau";
        measure[{key, prev_blocks[br.target]}] += br.prob;
      }
      std::ostringstream m;
      for (const auto& [k, prob] : measure)
        m << k.first << "@" << k.second << "=" << to_string(prob) << ";";
      reps.emplace(m.str(), g.branches.front().act);
    }
    return reps;
  };
  auto ma = measures_of(a), mb = measures_of(b);
  for (const auto& [sig, act] : ma)
    if (!mb.count(sig)) return act;
  for (const auto& [sig, act] : mb)
    if (!ma.count(sig)) return act;
  return std::nullopt;
}

verdict refinement_verdict(const plts& l, int a, int b, eq_mode mode) {
  validate_state(l, a);
  validate_state(l, b);
  partition fixed = refine_partition(l, mode, -1);
  verdict v;
  v.truncated = l.any_truncated;
  if (fixed.same_block(a, b)) {
    v.status = verdict_status::equivalent;
    if (v.truncated) v.note = "equivalence on a truncated system is inconclusive";
    return v;
  }
  v.status = verdict_status::not_equivalent;
  // Stratification level: first n with (a, b) separated in ~_n.
  std::vector<int> blocks(l.state_count(), 0);
  for (int n = 1; n <= l.state_count() + 1; ++n) {
    std::vector<int> prev = blocks;
    refine_round(l, blocks, mode);
    if (blocks[a] != blocks[b]) {
      v.level = n;
      v.witness_action = distinguishing_action(l, a, b, prev, mode);
      break;
    }
  }
  return v;
}

} // namespace

verdict bisimilar(const plts& l, int a, int b) { return refinement_verdict(l, a, b, eq_mode::bisim); }

verdict reduction_bisimilar(const plts& l, int a, int b) {
  return refinement_verdict(l, a, b, eq_mode::reduction);
}

verdict barbed_bisimilar(const plts& l, int a, int b) {
  return refinement_verdict(l, a, b, eq_mode::barbed);
}

bool stratified_bisimilar(const plts& l, int a, int b, int n) {
  validate_state(l, a);
  validate_state(l, b);
  partition p = refine_partition(l, eq_mode::bisim, n);
  return p.same_block(a, b);
}

// ---------------------------------------------------------------------------
// Bounded checks.
// ---------------------------------------------------------------------------

verdict barbed_equivalent_bounded(const proc& p, const proc& q, const noise_model& nm,
                                  const std::vector<proc>& testers, const bound_options& opts) {
  verdict v;
  v.status = verdict_status::equivalent_up_to_family;
  for (const auto& tester : testers) {
    plts_options po;
    po.rep_budget = opts.rep_budget;
    po.max_states = opts.max_states;
    plts l = build_plts({make_par(p, tester), make_par(q, tester)}, nm, po);
    verdict inner = barbed_bisimilar(l, l.initials[0], l.initials[1]);
    if (inner.status == verdict_status::not_equivalent) {
      v.status = verdict_status::not_equivalent;
      v.witness_tester = tester;
      v.level = inner.level;
      v.truncated = false;
      return v;
    }
    if (inner.truncated) v.truncated = true;
  }
  return v;
}

verdict barbed_congruent_bounded(const proc& p, const proc& q, const noise_model& nm,
                                 const std::vector<context>& contexts, const bound_options& opts) {
  verdict v;
  v.status = verdict_status::equivalent_up_to_family;
  for (const auto& c : contexts) {
    plts_options po;
    po.rep_budget = opts.rep_budget;
    po.max_states = opts.max_states;
    plts l = build_plts({apply_context(c, p), apply_context(c, q)}, nm, po);
    verdict inner = barbed_bisimilar(l, l.initials[0], l.initials[1]);
    if (inner.status == verdict_status::not_equivalent) {
      v.status = verdict_status::not_equivalent;
      v.witness_context = c;
      v.level = inner.level;
      v.truncated = false;
      return v;
    }
    if (inner.truncated) v.truncated = true;
  }
  return v;
}

name_set default_substitution_universe(const proc& p, const proc& q) {
  name_set out = free_names(p);
  auto fq = free_names(q);
  out.insert(fq.begin(), fq.end());
  name_set avoid = all_names(p);
  auto aq = all_names(q);
  avoid.insert(aq.begin(), aq.end());
  out.insert(fresh_name(avoid));
  return out;
}

verdict full_bisimilar_bounded(const proc& p, const proc& q, const noise_model& nm,
                               const name_set& universe, const bound_options& opts) {
  verdict v;
  v.status = verdict_status::equivalent_up_to_family;
  name_set domain = free_names(p);
  auto fq = free_names(q);
  domain.insert(fq.begin(), fq.end());
  std::vector<name> dom(domain.begin(), domain.end());
  std::vector<name> uni(universe.begin(), universe.end());
  if (uni.empty() || dom.empty()) {
    // Only the identity substitution applies.
    uni.clear();
  }

  std::vector<size_t> pick(dom.size(), 0);
  auto run_one = [&](const substitution& s) -> bool {
    plts_options po;
    po.rep_budget = opts.rep_budget;
    po.max_states = opts.max_states;
    proc ps = apply_substitution(p, s);
    proc qs = apply_substitution(q, s);
    plts l = build_plts({ps, qs}, nm, po);
    verdict inner = bisimilar(l, l.initials[0], l.initials[1]);
    if (inner.status == verdict_status::not_equivalent) {
      v.status = verdict_status::not_equivalent;
      v.witness_substitution = s;
      v.level = inner.level;
      v.truncated = false;
      return true;
    }
    if (inner.truncated) v.truncated = true;
    return false;
  };

  if (uni.empty()) {
    run_one(substitution{});
    return v;
  }
  for (;;) {
    substitution s;
    for (size_t i = 0; i < dom.size(); ++i) s.set(dom[i], uni[pick[i]]);
    if (run_one(s)) return v;
    size_t i = 0;
    while (i < pick.size()) {
      if (++pick[i] < uni.size()) break;
      pick[i] = 0;
      ++i;
    }
    if (i == pick.size()) break;
  }
  return v;
}

bool check_bisimulation_up_to(const plts& l, const std::vector<std::pair<int, int>>& pairs) {
  if (l.any_truncated)
    throw std::invalid_argument("bisimulation-up-to check rejects truncated systems");
  for (const auto& [a, b] : pairs) {
    validate_state(l, a);
    validate_state(l, b);
  }
  partition sim = refine_partition(l, eq_mode::bisim, -1);

  // Blocks of (R u ~)*: union-find seeded with the ~ blocks.
  std::vector<int> parent(l.state_count());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto unite = [&](int a, int b) { parent[find(a)] = find(b); };
  std::map<int, int> block_leader;
  for (int s = 0; s < l.state_count(); ++s) {
    auto [it, inserted] = block_leader.emplace(sim.block_of[s], s);
    if (!inserted) unite(s, it->second);
  }
  for (const auto& [a, b] : pairs) unite(a, b);

  std::vector<int> closure(l.state_count());
  for (int s = 0; s < l.state_count(); ++s) closure[s] = find(s);

  auto measures_of = [&](int s) {
    std::set<std::string> out;
    for (const auto& g : l.states[s].groups) {
      std::map<std::pair<std::string, int>, rational> measure;
      for (const auto& br : g.branches)
        measure[{render_action(br.act), closure[br.target]}] += br.prob;
      std::ostringstream m;
      for (const auto& [k, prob] : measure)
        m << k.first << "@" << k.second << "=" << to_string(prob) << ";";
      out.insert(m.str());
    }
    return out;
  };

  for (const auto& [a, b] : pairs) {
    if (measures_of(a) != measures_of(b)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Verdict rendering and the hierarchy report.
// ---------------------------------------------------------------------------

std::string render_verdict(const std::string& relation, const verdict& v) {
  std::ostringstream out;
  out << "VERDICT " << relation << " ";
  switch (v.status) {
    case verdict_status::equivalent: out << "equivalent"; break;
    case verdict_status::not_equivalent: out << "not-equivalent"; break;
    case verdict_status::equivalent_up_to_family: out << "equivalent-up-to-family"; break;
  }
  if (v.witness_action) out << " witness=action:" << render_action(*v.witness_action);
  if (v.witness_tester) out << " witness=tester:" << render_process(*v.witness_tester);
  if (v.witness_context) out << " witness=context:" << render_context(*v.witness_context);
  if (v.witness_substitution) out << " witness=subst:" << v.witness_substitution->render();
  if (v.level) out << " level=" << *v.level;
  if (v.truncated) out << " truncated";
  return out.str();
}

hierarchy_result hierarchy_report(const proc& p, const proc& q, const noise_model& nm,
                                  const hierarchy_bounds& bounds) {
  hierarchy_result r;
  plts_options po;
  po.rep_budget = bounds.limits.rep_budget;
  po.max_states = bounds.limits.max_states;
  plts l = build_plts({p, q}, nm, po);
  int a = l.initials[0], b = l.initials[1];

  verdict reduction = reduction_bisimilar(l, a, b);
  verdict barbed = barbed_bisimilar(l, a, b);
  verdict bisim = bisimilar(l, a, b);

  name_set ingredients = default_equivalence_ingredients(p, q, nm);
  std::vector<proc> testers = bounds.testers ? *bounds.testers : default_testers(ingredients);
  verdict equiv = barbed_equivalent_bounded(p, q, nm, testers, bounds.limits);

  auto contexts = generate_contexts(ingredients, bounds.context_depth);
  verdict cong = barbed_congruent_bounded(p, q, nm, contexts, bounds.limits);

  name_set universe = bounds.universe ? *bounds.universe : default_substitution_universe(p, q);
  verdict full = full_bisimilar_bounded(p, q, nm, universe, bounds.limits);

  r.rows = {{"reduction-bisim", reduction}, {"barbed-bisim", barbed},
            {"barbed-equiv", equiv},        {"barbed-cong", cong},
            {"bisim", bisim},               {"full-bisim", full}};

  // Verdict-level arrows of the hierarchy; an up-to-family verdict never
  // refutes, so only refutations can violate an arrow.
  auto refuted = [](const verdict& v) { return v.status == verdict_status::not_equivalent; };
  auto proven = [](const verdict& v) { return v.status == verdict_status::equivalent; };
  struct arrow {
    const verdict* fine;
    const verdict* coarse;
    const char* names;
  };
  std::vector<arrow> arrows = {
      {&bisim, &barbed, "bisim => barbed-bisim"},
      {&barbed, &reduction, "barbed-bisim => reduction-bisim"},
      {&full, &bisim, "full-bisim => bisim"},
      // Theorem: bisimilarity implies barbed equivalence; with a bounded
      // tester family the coarse side can only be refuted, never proven.
      {&bisim, &equiv, "bisim => barbed-equiv"},
      {&cong, &equiv, "barbed-cong => barbed-equiv"},
      {&equiv, &barbed, "barbed-equiv => barbed-bisim"},
  };
  for (const auto& ar : arrows) {
    if (proven(*ar.fine) && !ar.fine->truncated && refuted(*ar.coarse)) {
      r.arrows_consistent = false;
      r.violation = ar.names;
      break;
    }
  }
  return r;
}

std::string render_hierarchy(const hierarchy_result& r) {
  std::ostringstream out;
  auto find = [&](const std::string& rel) -> const verdict& {
    for (const auto& row : r.rows)
      if (row.relation == rel) return row.v;
    throw std::logic_error("missing relation row");
  };
  auto mark = [&](const std::string& rel) {
    const verdict& v = find(rel);
    switch (v.status) {
      case verdict_status::equivalent: return std::string("yes");
      case verdict_status::not_equivalent: return std::string("no");
      case verdict_status::equivalent_up_to_family: return std::string("yes*");
    }
    return std::string("?");
  };
  out << "hierarchy (A -> B: A strictly included in B; yes* = up to bounded family)\n";
  out << "  full-bisim [" << mark("full-bisim") << "] -> bisim [" << mark("bisim")
      << "] -> barbed-equiv [" << mark("barbed-equiv") << "]\n";
  out << "  full-bisim [" << mark("full-bisim") << "] -> barbed-cong [" << mark("barbed-cong")
      << "] -> barbed-equiv [" << mark("barbed-equiv") << "]\n";
  out << "  barbed-equiv [" << mark("barbed-equiv") << "] -> barbed-bisim ["
      << mark("barbed-bisim") << "] -> reduction-bisim [" << mark("reduction-bisim") << "]\n";
  for (const auto& row : r.rows) out << render_verdict(row.relation, row.v) << "\n";
  if (!r.arrows_consistent) out << "hierarchy violation: " << r.violation << "\n";
  return out.str();
}

} // namespace pin
