#include <doctest.h>

#include "pin/congruence.hpp"
#include "pin/parse.hpp"
#include "pin/process.hpp"
#include "pin/subst.hpp"

using namespace pin;

TEST_CASE("parse: nil literal") {
  proc p = parse_process("0");
  CHECK(is_nil(p));
}

TEST_CASE("parse: sum of two outputs") {
  proc p = parse_process("x!y.0 + x!z.0");
  const auto* s = std::get_if<sum_node>(&p->node);
  REQUIRE(s);
  const auto* l = std::get_if<prefix_node>(&s->left->node);
  const auto* r = std::get_if<prefix_node>(&s->right->node);
  REQUIRE(l);
  REQUIRE(r);
  CHECK(std::get<output_core>(l->pfx.core) == output_core{name("x"), name("y")});
  CHECK(std::get<output_core>(r->pfx.core) == output_core{name("x"), name("z")});
  CHECK(is_nil(l->body));
  CHECK(is_nil(r->body));
}

TEST_CASE("parse: restriction and input nesting") {
  proc p = parse_process("(nu s) x?(z).(nu z) y!z.x!s.0");
  const auto* nu = std::get_if<nu_node>(&p->node);
  REQUIRE(nu);
  CHECK(nu->binder == name("s"));
  const auto* in = std::get_if<prefix_node>(&nu->body->node);
  REQUIRE(in);
  CHECK(std::get<input_core>(in->pfx.core) == input_core{name("x"), name("z")});
  CHECK(std::holds_alternative<nu_node>(in->body->node));
}

TEST_CASE("parse: trailing .0 elision") {
  CHECK(equal(parse_process("x!y"), parse_process("x!y.0")));
  CHECK(equal(parse_process("x!y + x!z"), parse_process("x!y.0 + x!z.0")));
}

TEST_CASE("parse: syntax errors carry position") {
  try {
    parse_process("x!y.0 +\n )");
    FAIL("expected parse error");
  } catch (const parse_error& e) {
    CHECK(e.kind == parse_error::kind_t::syntax);
    CHECK(e.line == 2);
  }
}

TEST_CASE("parse: sum-grammar violation is reported distinctly") {
  try {
    parse_process("(a!a | b!b) + c!c");
    FAIL("expected sum-grammar error");
  } catch (const parse_error& e) {
    CHECK(e.kind == parse_error::kind_t::sum_grammar);
  }
  // A parenthesized summation is a legal sum operand.
  CHECK_NOTHROW(parse_process("(a!a.0 + b!b.0) + c!c.0"));
  // Mixing + and | at one level needs parentheses.
  CHECK_THROWS_AS(parse_process("a!a.0 + b!b.0 | c!c.0"), parse_error);
}

TEST_CASE("parse: internal names are rejected") {
  CHECK_THROWS_AS(parse_process("#0!y.0"), parse_error);
}

TEST_CASE("render: canonical text") {
  CHECK(render_process(make_nil()) == "0");
  CHECK(render_process(parse_process("x!y.0 + x!z.0")) == "x!y.0 + x!z.0");
  proc p = make_nu(name("y"), p_out(name("x"), name("y"), p_out(name("x"), name("y"))));
  CHECK(render_process(p) == "(nu y) x!y.x!y.0");
}

TEST_CASE("render/parse round-trip on sample terms") {
  for (const char* text :
       {"0", "tau.0", "x!y.0", "x?(z).z!y.0", "x!y.0 + tau.0", "a!b.0 | c?(d).0",
        "(nu z) (x!z.0 | z?(w).w!w.0)", "!x?(y).y!y.0", "[a=b]tau.0", "[a=b][c=d]x!y.0",
        "x!y.(a!a.0 + b!b.0)", "(a!a.0 + b!b.0) | 0"}) {
    proc p = parse_process(text);
    CHECK(equal(parse_process(render_process(p)), p));
  }
}

TEST_CASE("classify_names: mixed binder kinds") {
  proc p = parse_process("(nu s) x?(z).(nu z) y!z.x!s.0");
  auto c = classify_names(p);
  CHECK(c.free == name_set{name("x"), name("y")});
  CHECK(c.strongly_bound == name_set{name("z")});
  CHECK(c.weakly_bound == name_set{name("s")});
}

TEST_CASE("classify_names: trivial cases") {
  auto c0 = classify_names(parse_process("0"));
  CHECK(c0.free.empty());
  CHECK(c0.strongly_bound.empty());
  CHECK(c0.weakly_bound.empty());

  auto c1 = classify_names(parse_process("x!y.0"));
  CHECK(c1.free == name_set{name("x"), name("y")});
  CHECK(c1.strongly_bound.empty());
  CHECK(c1.weakly_bound.empty());
}

TEST_CASE("apply_substitution: worked example from the semantics") {
  // (a(x).(nu b) x!b.c!y.0){x,c/y,b} = a(z).(nu c) z!c.c!x.0
  proc p = parse_process("a?(x).(nu b) x!b.c!y.0");
  substitution s{{name("y"), name("x")}, {name("b"), name("c")}};
  proc got = apply_substitution(p, s);
  proc want = parse_process("a?(z).(nu c) z!c.c!x.0");
  noise_model noiseless;
  CHECK(structurally_congruent(got, want, noiseless));
  // The fresh binder must have steered clear of the substituted names.
  const auto* in = std::get_if<prefix_node>(&got->node);
  REQUIRE(in);
  CHECK(std::get<input_core>(in->pfx.core).channel == name("a"));
  CHECK(std::get<input_core>(in->pfx.core).binder != name("x"));
}

TEST_CASE("apply_substitution: identity and free renaming") {
  proc p = parse_process("x?(z).(nu w) z!w.0 + tau.0");
  CHECK(equal(apply_substitution(p, substitution{}), p));
  CHECK(equal(apply_substitution(parse_process("x!y.0"), substitution{{name("x"), name("a")}}),
              parse_process("a!y.0")));
}

TEST_CASE("apply_substitution: restriction binders are substituted, never renamed") {
  // ((nu z)P)sigma = (nu z.sigma)P.sigma, captures included.
  proc p = parse_process("(nu s) x!a.0");
  proc got = apply_substitution(p, substitution{{name("a"), name("s")}});
  CHECK(equal(got, parse_process("(nu s) x!s.0")));
}

TEST_CASE("noisy_free_names: total noise can drop a free name") {
  noise_model nm = load_noise_model("channel x : y -> { z: 1 }\n");
  CHECK(noisy_free_names(parse_process("x!y.0"), nm) == name_set{name("x"), name("z")});
  CHECK(nm.rows_dropping_input().size() == 1);
}

TEST_CASE("noisy_free_names: nil and restriction") {
  noise_model nm = load_noise_model("channel x : y -> { z: 1/2, y: 1/2 }\n");
  CHECK(noisy_free_names(parse_process("0"), nm).empty());
  // fn*((nu z)(x!y.0)) = {x, y, z} \ {z}
  CHECK(noisy_free_names(parse_process("(nu z) x!y.0"), nm) == name_set{name("x"), name("y")});
}

TEST_CASE("noisy_free_names: input clause closes over noise outputs") {
  noise_model nm = load_noise_model("channel x : y -> { w: 1 }\n");
  // Receiving y leads to emitting y on x, which noise turns into w.
  auto fs = noisy_free_names(parse_process("a?(v).x!v.0"), nm);
  CHECK(fs.count(name("a")));
  CHECK(fs.count(name("x")));
  CHECK(fs.count(name("w")));
  CHECK(!fs.count(name("y"))); // stripped as the instantiated name
}

TEST_CASE("structural_normal_form: scope minimization") {
  noise_model noiseless;
  proc p = parse_process("(nu y) (tau.0 | y!y.0)");
  CHECK(render_process(structural_normal_form(p, noiseless)) == "tau.0 | (nu y) y!y.0");
}

TEST_CASE("structural_normal_form: match axioms") {
  noise_model noiseless;
  CHECK(equal(structural_normal_form(parse_process("[x=x]tau.0"), noiseless),
              parse_process("tau.0")));
  CHECK(is_nil(structural_normal_form(parse_process("[x=y]tau.0"), noiseless)));
  // A guard over an input-bound name survives: instantiation may satisfy it.
  proc guarded = parse_process("x?(w).[w=y]tau.0");
  proc nf = structural_normal_form(guarded, noiseless);
  CHECK(!is_nil(nf));
  CHECK(structurally_congruent(nf, guarded, noiseless));
}

TEST_CASE("structural_normal_form: unit and nil elimination") {
  noise_model noiseless;
  proc p = parse_process("x!y.0 | 0");
  CHECK(equal(structural_normal_form(p, noiseless), parse_process("x!y.0")));
  CHECK(is_nil(structural_normal_form(parse_process("(nu z) 0"), noiseless)));
  CHECK(is_nil(structural_normal_form(parse_process("0 + 0"), noiseless)));
}

TEST_CASE("structurally_congruent: commutativity, scope, and mismatch") {
  noise_model noiseless;
  proc p = parse_process("a!b.0");
  proc q = parse_process("c?(d).0");
  CHECK(structurally_congruent(make_par(p, q), make_par(q, p), noiseless));
  CHECK(structurally_congruent(parse_process("(nu y) (tau.0 | y!y.0)"),
                               parse_process("tau.0 | (nu y) y!y.0"), noiseless));
  CHECK(!structurally_congruent(parse_process("x!y.0"), parse_process("x!z.0"), noiseless));
}

TEST_CASE("structurally_congruent: alpha-conversion of input binders only") {
  noise_model noiseless;
  CHECK(structurally_congruent(parse_process("x?(a).a!a.0"), parse_process("x?(b).b!b.0"),
                               noiseless));
  // Weakly bound names cannot be converted.
  CHECK(!structurally_congruent(parse_process("(nu a) x!a.0"), parse_process("(nu b) x!b.0"),
                                noiseless));
}

TEST_CASE("rigid_normal_form: no scope minimization, restriction drop still applies") {
  noise_model noiseless;
  proc p = parse_process("(nu y) (tau.0 | y!y.0)");
  CHECK(render_process(rigid_normal_form(p, noiseless)) == "(nu y) (tau.0 | y!y.0)");
  // (nu z)P with z not in fn*(P) is dropped in both variants.
  CHECK(equal(rigid_normal_form(parse_process("(nu z) tau.0"), noiseless),
              parse_process("tau.0")));
}
