#include "pin/demos.hpp"

#include <sstream>

#include "pin/parse.hpp"

namespace pin {

namespace {

// Channel x garbles y and z into each other with equal probability.
noise_model guarded_pair_matrix() {
  return load_noise_model(
      "channel x : y -> { y: 1/2, z: 1/2 }\n"
      "channel x : z -> { y: 1/2, z: 1/2 }\n");
}

noise_model two_row_matrix() {
  return load_noise_model(
      "channel x : y -> { y: 7/10, z: 1/10, s: 1/10, t: 1/10 }\n"
      "channel x : z -> { y: 1/2, z: 3/10, s: 1/10, w: 1/10 }\n");
}

std::string status_word(const verdict& v) {
  switch (v.status) {
    case verdict_status::equivalent: return "equivalent";
    case verdict_status::not_equivalent: return "not-equivalent";
    case verdict_status::equivalent_up_to_family: return "equivalent-up-to-family";
  }
  return "?";
}

struct runner {
  demo_result result;
  const demo_options& opts;

  void row(const std::string& id, const std::string& description, const std::string& expected,
           const std::string& computed) {
    demo_row r{id, description, expected, computed, expected == computed};
    if (!r.pass) result.all_pass = false;
    result.rows.push_back(std::move(r));
  }

  noise_model guarded_noise() const {
    return opts.guarded_pair_noise_override ? *opts.guarded_pair_noise_override
                                            : guarded_pair_matrix();
  }

  void noisy_output_groups() {
    noise_model nm = two_row_matrix();
    proc p = parse_process("x!y + x!z");
    auto groups = transition_groups(p, nm, default_instantiation({p}, nm));
    std::ostringstream got;
    got << groups.size() << " groups";
    for (const auto& g : groups) {
      got << " {";
      for (const auto& br : g.branches)
        got << " " << render_action(br.act) << ":" << to_string(br.prob);
      got << " }";
    }
    row("noisy-output-groups", "a noisy choice has one transition group per summand",
        "2 groups { x!s:1/10 x!t:1/10 x!y:7/10 x!z:1/10 } { x!s:1/10 x!w:1/10 x!y:1/2 x!z:3/10 }",
        got.str());
  }

  void output_chain_tester() {
    noise_model nm; // noiseless
    proc p = parse_process("x!a.y!b");
    proc q = parse_process("x!a");
    proc tester = parse_process("x?(w)");
    verdict v = barbed_equivalent_bounded(p, q, nm, {tester});
    std::string got = status_word(v);
    if (v.witness_tester) got += " witness=" + render_process(*v.witness_tester);
    row("output-chain-tester", "tester x?(w) separates x!a.y!b from x!a",
        "not-equivalent witness=x?(w).0", got);
  }

  void guarded_pair_barbed_equivalent() {
    noise_model nm = guarded_noise();
    proc p = parse_process("x?(w).[w=y]tau");
    proc q = parse_process("x?(w).[w=z]tau");
    auto testers = default_testers(default_equivalence_ingredients(p, q, nm));
    verdict v = barbed_equivalent_bounded(p, q, nm, testers);
    std::string got = status_word(v);
    if (v.witness_tester) got += " witness=" + render_process(*v.witness_tester);
    row("guarded-pair-barbed-equivalent",
        "x?(w).[w=y]tau and x?(w).[w=z]tau stay barbed equivalent over the tester family",
        "equivalent-up-to-family", got);
  }

  void guarded_pair_context() {
    noise_model nm = guarded_noise();
    proc p = parse_process("x?(w).[w=y]tau");
    proc q = parse_process("x?(w).[w=z]tau");
    context c;
    c.layers.push_back(ctx_prefix{prefix{{}, input_core{name("x"), name("y")}}});
    c.layers.push_back(ctx_par_left{parse_process("x!s.x!s")});
    verdict v = barbed_congruent_bounded(p, q, nm, {c});
    row("guarded-pair-context", "the capturing context x?(y).[ ]|x!s.x!s separates the pair",
        "not-equivalent", status_word(v));
  }

  void interleaving_context() {
    noise_model nm = load_noise_model("channel x : b -> { b: 1 }\n");
    proc p = parse_process("a!u | b?(v)");
    proc q = parse_process("a!u.b?(v) + b?(v).a!u");
    context c;
    c.layers.push_back(ctx_prefix{prefix{{}, input_core{name("x"), name("a")}}});
    c.layers.push_back(ctx_par_left{parse_process("x!b")});
    verdict v = barbed_congruent_bounded(p, q, nm, {c});
    row("interleaving-context", "context (x?(a).[ ])|x!b separates a!u|b?(v) from its sum form",
        "not-equivalent", status_word(v));
  }

  void interleaving_bisimilar() {
    noise_model nm = load_noise_model("channel x : b -> { b: 1 }\n");
    proc p = parse_process("a!u | b?(v)");
    proc q = parse_process("a!u.b?(v) + b?(v).a!u");
    plts l = build_plts({p, q}, nm);
    verdict v = bisimilar(l, l.initials[0], l.initials[1]);
    row("interleaving-bisimilar", "a!u|b?(v) ~ a!u.b?(v)+b?(v).a!u", "equivalent",
        status_word(v));
  }

  void interleaving_substitution() {
    noise_model nm = load_noise_model("channel x : b -> { b: 1 }\n");
    proc p = parse_process("a!u | b?(v)");
    proc q = parse_process("a!u.b?(v) + b?(v).a!u");
    name_set universe{name("a"), name("b"), name("u"), name("v")};
    universe.insert(fresh_name(universe));
    verdict v = full_bisimilar_bounded(p, q, nm, universe);
    std::string got = status_word(v);
    if (v.witness_substitution) {
      got += (*v.witness_substitution)(name("b")) == name("a") ? " witness-maps-b-to-a"
                                                               : " witness-misses-b-to-a";
    }
    row("interleaving-substitution", "identifying b with a breaks the bisimilarity",
        "not-equivalent witness-maps-b-to-a", got);
  }

  void guarded_pair_bisimilarity() {
    noise_model nm = guarded_noise();
    proc p = parse_process("x?(w).[w=y]tau");
    proc q = parse_process("x?(w).[w=z]tau");
    plts l = build_plts({p, q}, nm);
    verdict v = bisimilar(l, l.initials[0], l.initials[1]);
    std::ostringstream got;
    got << status_word(v);
    if (v.level) got << " level=" << *v.level;
    if (v.witness_action && v.witness_action->kind == action_kind::input &&
        v.witness_action->subject == name("x"))
      got << " input-on-x";
    row("guarded-pair-bisimilarity", "the barbed-equivalent guarded pair is not bisimilar",
        "not-equivalent level=2 input-on-x", got.str());
  }

  void restriction_placement_bisimilarity() {
    noise_model nm; // noiseless
    proc p = parse_process("(nu y) x!y.x!y");
    proc q = parse_process("(nu y) x!y.(nu y) x!y");
    plts l = build_plts({p, q}, nm);
    verdict v = bisimilar(l, l.initials[0], l.initials[1]);
    row("restriction-placement-bisimilarity",
        "(nu y)x!y.x!y is not bisimilar to (nu y)x!y.(nu y)x!y", "not-equivalent",
        status_word(v));
  }

  void restriction_placement_contexts() {
    noise_model nm; // noiseless
    proc p = parse_process("(nu y) x!y.x!y");
    proc q = parse_process("(nu y) x!y.(nu y) x!y");
    auto contexts = generate_contexts(default_equivalence_ingredients(p, q, nm), 2);
    verdict v = barbed_congruent_bounded(p, q, nm, contexts);
    std::string got = status_word(v);
    if (v.witness_context) got += " witness=" + render_context(*v.witness_context);
    row("restriction-placement-contexts",
        "no context in the depth-2 family separates the non-bisimilar pair",
        "equivalent-up-to-family", got);
  }
};

} // namespace

std::vector<std::pair<std::string, std::string>> demo_list() {
  return {
      {"noisy-output-groups", "transition groups of x!y + x!z under a two-row matrix"},
      {"output-chain-tester", "tester x?(w) refutes barbed equivalence of x!a.y!b and x!a"},
      {"guarded-pair-barbed-equivalent", "barbed equivalence up to the tester family"},
      {"guarded-pair-context", "barbed congruence refuted by x?(y).[ ]|x!s.x!s"},
      {"interleaving-context", "barbed congruence refuted by (x?(a).[ ])|x!b"},
      {"interleaving-bisimilar", "a!u|b?(v) bisimilar to its sequentialization"},
      {"interleaving-substitution", "full bisimilarity refuted by {a/b}"},
      {"guarded-pair-bisimilarity", "bisimilarity refuted at stratification level 2"},
      {"restriction-placement-bisimilarity", "bisimilarity sees the restriction placement"},
      {"restriction-placement-contexts", "barbed congruence holds over the context family"},
  };
}

demo_result run_demo(const demo_options& opts) {
  runner r{demo_result{}, opts};
  r.noisy_output_groups();
  r.output_chain_tester();
  r.guarded_pair_barbed_equivalent();
  r.guarded_pair_context();
  r.interleaving_context();
  r.interleaving_bisimilar();
  r.interleaving_substitution();
  r.guarded_pair_bisimilarity();
  r.restriction_placement_bisimilarity();
  r.restriction_placement_contexts();
  return r.result;
}

std::string render_demo(const demo_result& r) {
  std::ostringstream out;
  for (const auto& row : r.rows) {
    out << (row.pass ? "[ok]   " : "[FAIL] ") << row.id << ": " << row.description << "\n";
    out << "       expected: " << row.expected << "\n";
    out << "       computed: " << row.computed << "\n";
  }
  out << (r.all_pass ? "demo: all rows match\n" : "demo: MISMATCH\n");
  return out.str();
}

} // namespace pin
