#include <doctest.h>

#include <algorithm>

#include "pin/equivalence.hpp"
#include "pin/parse.hpp"

using namespace pin;

namespace {

noise_model guarded_pair_matrix() {
  return load_noise_model(
      "channel x : y -> { y: 1/2, z: 1/2 }\n"
      "channel x : z -> { y: 1/2, z: 1/2 }\n");
}

noise_model x_noiseless_at_b() { return load_noise_model("channel x : b -> { b: 1 }\n"); }

verdict run_bisim(const proc& p, const proc& q, const noise_model& nm) {
  plts l = build_plts({p, q}, nm);
  return bisimilar(l, l.initials[0], l.initials[1]);
}

} // namespace

TEST_CASE("bisimilar: the guarded input pair separates at level 2 via an input on x") {
  noise_model nm = guarded_pair_matrix();
  proc p = parse_process("x?(w).[w=y]tau");
  proc q = parse_process("x?(w).[w=z]tau");
  plts l = build_plts({p, q}, nm);
  verdict v = bisimilar(l, l.initials[0], l.initials[1]);
  CHECK(v.status == verdict_status::not_equivalent);
  REQUIRE(v.level.has_value());
  CHECK(*v.level == 2);
  REQUIRE(v.witness_action.has_value());
  CHECK(v.witness_action->kind == action_kind::input);
  CHECK(v.witness_action->subject == name("x"));
}

TEST_CASE("bisimilar: parallel vs interleaved sum") {
  noise_model nm = x_noiseless_at_b();
  verdict v = run_bisim(parse_process("a!u | b?(v)"),
                        parse_process("a!u.b?(v) + b?(v).a!u"), nm);
  CHECK(v.status == verdict_status::equivalent);
}

TEST_CASE("bisimilar: restriction placement is observable") {
  noise_model nm;
  verdict v = run_bisim(parse_process("(nu y) x!y.x!y"),
                        parse_process("(nu y) x!y.(nu y) x!y"), nm);
  CHECK(v.status == verdict_status::not_equivalent);
  // x!y.0 is not bisimilar to (nu y) x!y.0, so the roots split one level up.
  CHECK(*v.level == 2);
}

TEST_CASE("stratified_bisimilar: level-by-level membership") {
  noise_model nm = guarded_pair_matrix();
  proc p = parse_process("x?(w).[w=y]tau");
  proc q = parse_process("x?(w).[w=z]tau");
  plts l = build_plts({p, q}, nm);
  int a = l.initials[0], b = l.initials[1];
  CHECK(stratified_bisimilar(l, a, b, 0));
  CHECK(stratified_bisimilar(l, a, b, 1));
  CHECK(!stratified_bisimilar(l, a, b, 2));
  CHECK(!stratified_bisimilar(l, a, b, 7));
  CHECK(stratified_bisimilar(l, a, a, 5));
  CHECK_THROWS_AS(stratified_bisimilar(l, 0, 99, 1), std::out_of_range);
}

TEST_CASE("reduction_bisimilar: ignores everything but internal steps") {
  noise_model nm;
  CHECK(run_bisim(parse_process("0"), parse_process("0"), nm).status ==
        verdict_status::equivalent);
  plts l1 = build_plts({parse_process("x!a"), parse_process("y!a")}, nm);
  CHECK(reduction_bisimilar(l1, l1.initials[0], l1.initials[1]).status ==
        verdict_status::equivalent);

  plts l2 = build_plts({parse_process("tau.0"), parse_process("0")}, nm);
  CHECK(reduction_bisimilar(l2, l2.initials[0], l2.initials[1]).status ==
        verdict_status::not_equivalent);

  plts l3 = build_plts({parse_process("tau.tau.0"), parse_process("tau.0")}, nm);
  verdict v = reduction_bisimilar(l3, l3.initials[0], l3.initials[1]);
  CHECK(v.status == verdict_status::not_equivalent);
  CHECK(*v.level == 2);
}

TEST_CASE("barbed_bisimilar: barbs plus tau groups") {
  noise_model nm;
  plts l1 = build_plts({parse_process("x!a.y!b"), parse_process("x!a")}, nm);
  CHECK(barbed_bisimilar(l1, l1.initials[0], l1.initials[1]).status ==
        verdict_status::equivalent);

  // Structurally congruent processes share a state, hence a block.
  plts l2 = build_plts({parse_process("x!a.0 | 0"), parse_process("x!a.0")}, nm);
  CHECK(barbed_bisimilar(l2, l2.initials[0], l2.initials[1]).status ==
        verdict_status::equivalent);

  plts l3 = build_plts({parse_process("tau.0"), parse_process("x?(w).0")}, nm);
  CHECK(barbed_bisimilar(l3, l3.initials[0], l3.initials[1]).status ==
        verdict_status::not_equivalent);
}

TEST_CASE("barbed_equivalent_bounded: a single input tester splits the pair") {
  noise_model nm;
  proc p = parse_process("x!a.y!b");
  proc q = parse_process("x!a");
  verdict v = barbed_equivalent_bounded(p, q, nm, {parse_process("x?(w)")});
  CHECK(v.status == verdict_status::not_equivalent);
  REQUIRE(v.witness_tester.has_value());
  CHECK(render_process(*v.witness_tester) == "x?(w).0");

  verdict empty = barbed_equivalent_bounded(p, q, nm, {});
  CHECK(empty.status == verdict_status::equivalent_up_to_family);
}

TEST_CASE("barbed_equivalent_bounded: testers covering all four emitter forms") {
  noise_model nm = guarded_pair_matrix();
  proc p = parse_process("x?(w).[w=y]tau");
  proc q = parse_process("x?(w).[w=z]tau");
  std::vector<proc> testers = {
      parse_process("x!y"),                  // form (1)
      parse_process("(nu y) x!y"),           // form (2)
      parse_process("(nu z) x!z"),           // form (3)
      parse_process("(nu y) (nu z) x!y"),    // form (4)
      parse_process("x!s"),                  // non-noisy datum
      parse_process("c!d.c!d"),              // unrelated channel
      parse_process("x?(v).x!v"),            // input tester
      parse_process("x!y.x!z"),              // chained noisy emissions
  };
  verdict v = barbed_equivalent_bounded(p, q, nm, testers);
  CHECK(v.status == verdict_status::equivalent_up_to_family);
  CHECK(!v.witness_tester.has_value());
}

TEST_CASE("generate_contexts: hole, elementary instances, composed shapes") {
  name_set ingredients{name("x"), name("s")};
  auto depth0 = generate_contexts(ingredients, 0);
  REQUIRE(depth0.size() == 1);
  CHECK(render_context(depth0[0]) == "[ ]");

  auto depth1 = generate_contexts(ingredients, 1);
  auto contains = [](const std::vector<context>& family, const std::string& rendered) {
    return std::any_of(family.begin(), family.end(), [&](const context& c) {
      return render_context(c) == rendered;
    });
  };
  CHECK(contains(depth1, "x?(s).([ ])"));
  CHECK(contains(depth1, "([ ]) | x!s.0"));
  CHECK(contains(depth1, "(nu x) ([ ])"));
  CHECK(contains(depth1, "!([ ])"));

  auto depth2 = generate_contexts(ingredients, 2);
  CHECK(depth2.size() > depth1.size());
  // The distinguishing capture shape: x?(y).[ ] | x!s.x!s.
  CHECK(contains(depth2, "(x?(s).([ ])) | x!s.x!s.0"));
}

TEST_CASE("barbed_congruent_bounded: the capturing context refutes congruence") {
  noise_model nm = guarded_pair_matrix();
  proc p = parse_process("x?(w).[w=y]tau");
  proc q = parse_process("x?(w).[w=z]tau");
  context c;
  c.layers.push_back(ctx_prefix{prefix{{}, input_core{name("x"), name("y")}}});
  c.layers.push_back(ctx_par_left{parse_process("x!s.x!s")});
  CHECK(render_context(c) == "(x?(y).([ ])) | x!s.x!s.0");
  verdict v = barbed_congruent_bounded(p, q, nm, {c});
  CHECK(v.status == verdict_status::not_equivalent);
  REQUIRE(v.witness_context.has_value());
  CHECK(render_context(*v.witness_context) == render_context(c));
}

TEST_CASE("barbed_congruent_bounded: the input-capture context") {
  noise_model nm = x_noiseless_at_b();
  proc p = parse_process("a!u | b?(v)");
  proc q = parse_process("a!u.b?(v) + b?(v).a!u");
  context c;
  c.layers.push_back(ctx_prefix{prefix{{}, input_core{name("x"), name("a")}}});
  c.layers.push_back(ctx_par_left{parse_process("x!b")});
  verdict v = barbed_congruent_bounded(p, q, nm, {c});
  CHECK(v.status == verdict_status::not_equivalent);
}

TEST_CASE("barbed_congruent_bounded: reflexivity over any context list") {
  noise_model nm;
  proc p = parse_process("x!a.0 + tau.0");
  auto contexts = generate_contexts(name_set{name("x"), name("a")}, 1);
  verdict v = barbed_congruent_bounded(p, p, nm, contexts);
  CHECK(v.status == verdict_status::equivalent_up_to_family);
}

TEST_CASE("full_bisimilar_bounded: witness maps b to a") {
  noise_model nm = x_noiseless_at_b();
  proc p = parse_process("a!u | b?(v)");
  proc q = parse_process("a!u.b?(v) + b?(v).a!u");
  name_set universe{name("a"), name("b"), name("u"), name("v"), name("f0")};
  verdict v = full_bisimilar_bounded(p, q, nm, universe);
  CHECK(v.status == verdict_status::not_equivalent);
  REQUIRE(v.witness_substitution.has_value());
  CHECK((*v.witness_substitution)(name("b")) == name("a"));
}

TEST_CASE("full_bisimilar_bounded: reflexivity and duplicated sums") {
  noise_model nm;
  proc p = parse_process("x!a");
  CHECK(full_bisimilar_bounded(p, p, nm, default_substitution_universe(p, p)).status ==
        verdict_status::equivalent_up_to_family);
  proc q = parse_process("x!a + x!a");
  CHECK(full_bisimilar_bounded(p, q, nm, default_substitution_universe(p, q)).status ==
        verdict_status::equivalent_up_to_family);
}

TEST_CASE("check_bisimulation_up_to: pairs from the bisimilarity itself") {
  noise_model nm;
  plts l = build_plts({parse_process("tau.0 + tau.0"), parse_process("tau.0")}, nm);
  partition sim = refine_partition(l, eq_mode::bisim, -1);
  std::vector<std::pair<int, int>> pairs;
  for (int a = 0; a < l.state_count(); ++a)
    for (int b = a + 1; b < l.state_count(); ++b)
      if (sim.same_block(a, b)) pairs.push_back({a, b});
  REQUIRE(!pairs.empty());
  CHECK(check_bisimulation_up_to(l, pairs));
}

TEST_CASE("check_bisimulation_up_to: restriction-parallel closure pairs") {
  // (nu z)(P|R) against (nu z)(Q|R) for bisimilar P, Q.
  noise_model nm;
  proc p = parse_process("(nu a) ((tau.0 + tau.0) | x!a.0)");
  proc q = parse_process("(nu a) (tau.0 | x!a.0)");
  plts l = build_plts({p, q}, nm);
  CHECK(check_bisimulation_up_to(l, {{l.initials[0], l.initials[1]}}));
}

TEST_CASE("check_bisimulation_up_to: rejects non-bisimulations") {
  noise_model nm;
  plts l = build_plts({parse_process("tau.0"), parse_process("0")}, nm);
  CHECK(!check_bisimulation_up_to(l, {{l.initials[0], l.initials[1]}}));
}

TEST_CASE("hierarchy_report: the guarded input pair") {
  noise_model nm = guarded_pair_matrix();
  proc p = parse_process("x?(w).[w=y]tau");
  proc q = parse_process("x?(w).[w=z]tau");
  hierarchy_result r = hierarchy_report(p, q, nm);
  CHECK(r.arrows_consistent);
  auto row = [&](const std::string& rel) -> const verdict& {
    for (const auto& x : r.rows)
      if (x.relation == rel) return x.v;
    throw std::logic_error("row missing");
  };
  CHECK(row("barbed-equiv").status == verdict_status::equivalent_up_to_family);
  CHECK(row("bisim").status == verdict_status::not_equivalent);
  CHECK(row("barbed-cong").status == verdict_status::not_equivalent);
  CHECK(row("full-bisim").status == verdict_status::not_equivalent);
  CHECK(row("barbed-bisim").status == verdict_status::equivalent);
  CHECK(row("reduction-bisim").status == verdict_status::equivalent);
}

TEST_CASE("hierarchy_report: identical processes are equivalent everywhere") {
  noise_model nm;
  proc p = parse_process("x!a.0 + tau.0");
  hierarchy_result r = hierarchy_report(p, p, nm);
  CHECK(r.arrows_consistent);
  for (const auto& row : r.rows) CHECK(row.v.status != verdict_status::not_equivalent);
}

TEST_CASE("render_verdict: format") {
  verdict v;
  v.status = verdict_status::not_equivalent;
  v.level = 2;
  v.witness_action = action::make_input(name("x"), name("y"));
  CHECK(render_verdict("bisim", v) == "VERDICT bisim not-equivalent witness=action:x?y level=2");
  verdict t;
  t.status = verdict_status::equivalent;
  t.truncated = true;
  CHECK(render_verdict("barbed", t) == "VERDICT barbed equivalent truncated");
}
