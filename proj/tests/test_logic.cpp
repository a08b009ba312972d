#include <gtest/gtest.h>

#include <random>
#include <regex>

#include "ctxkit/ctxkit.hpp"
#include "oracles.hpp"

using namespace ctxkit;

namespace {

SignaturePtr sig_of(const ScenarioPtr& s) { return std::make_shared<const Signature>(s); }

std::vector<std::string> denote_rows(const Signature& sig, const std::string& text, std::initializer_list<std::string_view> ctx) {
  const Scenario& scn = sig.scenario();
  return section_strings(scn, denote(sig, parse_formula(text, sig), scn.context(ctx)));
}

}  // namespace

TEST(Parse, PrecedenceAndPrinting) {
  auto sig = sig_of(examples::square());
  const Scenario& scn = sig->scenario();
  Formula f = parse_formula("~a1 \\/ b2 /\\ a2", *sig);
  EXPECT_EQ(f.kind(), FormulaKind::Or);
  EXPECT_EQ(to_string(f, scn), "~a1 \\/ b2 /\\ a2");
  EXPECT_EQ(to_string(parse_formula("(a1 \\/ b1) /\\ a2", *sig), scn), "(a1 \\/ b1) /\\ a2");
  EXPECT_EQ(to_string(parse_formula("a1 (+) b1 = 0", *sig), scn), "a1 (+) b1 = 0");
  Formula ex = parse_formula("exists y : B . y = a1 /\\ ~(y = b1)", *sig);
  EXPECT_EQ(ex.kind(), FormulaKind::Exists);
  EXPECT_EQ(free_vars(ex), scn.context({"a1", "b1"}));
}

TEST(Parse, RoundTripThroughPrinter) {
  auto sig = sig_of(examples::square());
  const Scenario& scn = sig->scenario();
  for (const char* text : {"a1 = b1", "~(a1 = 0) /\\ b1", "a1 (+) a2 (+) b1 = 1", "top", "bot \\/ a2 < b2",
                           "exists z : B . exists w : B . z = a1 /\\ w = z", "~~a1", "a1 > b1"}) {
    Formula f = parse_formula(text, *sig);
    Formula g = parse_formula(to_string(f, scn), *sig);
    EXPECT_TRUE(same_formula(f, g, scn)) << text << " printed as " << to_string(f, scn);
  }
}

TEST(Parse, ErrorsCarryPositions) {
  auto sig = sig_of(examples::square());
  try {
    parse_formula("a1 /\\ zz = 0", *sig);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1u);
    EXPECT_EQ(e.column(), 7u);
  }
  try {
    parse_formula("a1 = 2", *sig, {}, 4, 10);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4u);
    EXPECT_GE(e.column(), 10u);
  }
  EXPECT_THROW(parse_formula("a1 /\\", *sig), ParseError);
  EXPECT_THROW(parse_formula("(a1", *sig), ParseError);
  EXPECT_THROW(parse_formula("a1 = b1 extra", *sig), ParseError);
  EXPECT_THROW(parse_formula("~a1", *sig, ParseOptions{true}), ParseError);
  EXPECT_NO_THROW(parse_formula("a1 /\\ exists y : B . y = b1", *sig, ParseOptions{true}));
}

TEST(Parse, SortErrors) {
  auto scn = make_scenario("m", {boolean_domain(), cyclic_domain("Z3", 3)}, {{"x", "B"}, {"z", "Z3"}}, {{"x", "z"}});
  auto sig = sig_of(scn);
  EXPECT_THROW(parse_formula("x = z", *sig), ParseError);
  EXPECT_THROW(parse_formula("z (+) z = 0", *sig), ParseError);
  EXPECT_NO_THROW(parse_formula("z + z = 2", *sig));
  EXPECT_THROW(parse_formula("z", *sig), ParseError);  // not two-valued
  // Constant-only atoms take the first domain holding every constant.
  EXPECT_TRUE(denote(*sig, parse_formula("0 = 1", *sig), Context{}).empty());
  EXPECT_THROW(parse_formula("0 = 5", *sig), ParseError);
  EXPECT_NO_THROW(parse_formula("1 < 2", *sig));
}

TEST(Fragment, Membership) {
  auto sig = sig_of(examples::square());
  const Scenario& scn = sig->scenario();
  EXPECT_TRUE(in_fragment(parse_formula("a1 = b1", *sig), scn.complex()));
  EXPECT_FALSE(in_fragment(parse_formula("a1 = a2", *sig), scn.complex()));
  EXPECT_TRUE(in_fragment(parse_formula("top", *sig), scn.complex()));
  EXPECT_THROW(parse_theory(sig, {"a1 = a2"}), LogicError);
  EXPECT_TRUE(is_regular(parse_formula("a1 /\\ exists y : B . y = a2", *sig)));
  EXPECT_FALSE(is_regular(parse_formula("a1 \\/ a2", *sig)));
}

TEST(Semantics, DenoteExamples) {
  auto sig = sig_of(examples::square());
  EXPECT_EQ(denote_rows(*sig, "a1 (+) b1 = 0", {"a1", "b1"}), (std::vector<std::string>{"00", "11"}));
  EXPECT_EQ(denote_rows(*sig, "~a1 \\/ ~b2", {"a1", "b2"}), (std::vector<std::string>{"00", "01", "10"}));
  EXPECT_EQ(denote_rows(*sig, "a1", {"a1", "b1"}), (std::vector<std::string>{"10", "11"}));
  EXPECT_EQ(denote_rows(*sig, "top", {}), (std::vector<std::string>{""}));
  EXPECT_TRUE(denote_rows(*sig, "bot", {"a1"}).empty());
  EXPECT_EQ(denote_rows(*sig, "exists y : B . y < b1", {"b1"}), (std::vector<std::string>{"1"}));
  EXPECT_THROW(denote(*sig, parse_formula("a1 = b1", *sig), sig->scenario().context({"a1"})), LogicError);
}

TEST(Semantics, ModularArithmeticAndSymbols) {
  auto scn = make_scenario("z", {cyclic_domain("Z4", 4)}, {{"x", "Z4"}, {"y", "Z4"}}, {{"x", "y"}});
  auto s = std::make_shared<Signature>(scn);
  std::size_t dbl = s->add_function("dbl", {"Z4"}, "Z4", {0, 2, 0, 2});
  std::size_t ne = s->add_relation("ne", {"Z4", "Z4"}, {{0, 1}, {1, 0}});
  (void)dbl;
  (void)ne;
  EXPECT_EQ(section_strings(*scn, denote(*s, parse_formula("x + 3 = y", *s), scn->context({"x", "y"}))),
            (std::vector<std::string>{"03", "10", "21", "32"}));
  EXPECT_EQ(section_strings(*scn, denote(*s, parse_formula("dbl(x) = 2", *s), scn->context({"x"}))),
            (std::vector<std::string>{"1", "3"}));
  EXPECT_EQ(section_strings(*scn, denote(*s, parse_formula("ne(x, y)", *s), scn->context({"x", "y"}))),
            (std::vector<std::string>{"01", "10"}));
  EXPECT_THROW(s->add_function("bad", {"Z4"}, "Z4", {0, 1}), LogicError);
  EXPECT_THROW(s->add_relation("x", {"Z4"}, {}), LogicError);
}

TEST(Semantics, SatisfactionAndGlobalEntailment) {
  auto hardy = examples::hardy();
  const Theory& t = *hardy.theory;
  for (const Formula& f : t.formulas()) EXPECT_TRUE(satisfies(*hardy.model, t.signature(), f));
  Formula a1b1 = parse_formula("~a1 \\/ ~b1", t.signature());
  EXPECT_FALSE(satisfies(*hardy.model, t.signature(), a1b1));
  Context x = t.scenario().universe();
  EXPECT_TRUE(global_entails(t.signature(), t.formulas(), a1b1, x));
  EXPECT_FALSE(global_entails(t.signature(), {}, a1b1, x));
}

TEST(Semantics, DenotationIsStableAcrossContexts) {
  auto sig = sig_of(examples::charlie_complex());
  const Scenario& scn = sig->scenario();
  std::mt19937 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    Formula f = oracle::random_fragment_formula(rng, *sig, 2);
    for (Context v : scn.members()) {
      if (!f.free_vars().subset_of(v)) continue;
      SectionSet dv = denote(*sig, f, v);
      for (Context u : scn.complex().faces_of(v)) {
        if (!f.free_vars().subset_of(u)) continue;
        SectionSet du = denote(*sig, f, u);
        EXPECT_EQ(dv, preimage(scn, du, v));
        EXPECT_EQ(image(scn, dv, u), du);
      }
    }
  }
}

TEST(Semantics, SatisfactionNeedsNoSignallingToTransfer) {
  // signal_e satisfies ~b1 at {a2 b1} but not at {a1 b1}.
  auto se = examples::signal_e();
  const Signature& sig = se.theory->signature();
  const Scenario& scn = sig.scenario();
  Formula nb1 = parse_formula("~b1", sig);
  EXPECT_TRUE(satisfies(*se.model, sig, nb1, scn.context({"a2", "b1"})));
  EXPECT_FALSE(satisfies(*se.model, sig, nb1, scn.context({"a1", "b1"})));
  EXPECT_FALSE(satisfies(*se.model, sig, nb1));
  EXPECT_FALSE(is_no_signalling(*se.model));
}

TEST(SemanticsProperty, DenoteMatchesEvaluationOracle) {
  std::mt19937 rng(9);
  auto sig = sig_of(examples::charlie_complex());
  const Scenario& scn = sig->scenario();
  for (int trial = 0; trial < 300; ++trial) {
    Formula f = oracle::random_fragment_formula(rng, *sig, 3);
    for (Context u : scn.members()) {
      if (!f.free_vars().subset_of(u)) continue;
      EXPECT_EQ(oracle::as_set(denote(*sig, f, u)), oracle::denote(*sig, f, u));
    }
    // Boolean laws on the same context.
    Context u = f.free_vars();
    SectionSet d = denote(*sig, f, u);
    EXPECT_EQ(denote(*sig, Formula::negate(f), u), d.complement());
    EXPECT_EQ(denote(*sig, Formula::conj(f, Formula::negate(f)), u), SectionSet(scn, u));
    EXPECT_EQ(denote(*sig, Formula::disj(f, Formula::top()), u), SectionSet::full(scn, u));
  }
}

TEST(RenderConstraint, DenotesItsSet) {
  auto sig = sig_of(examples::charlie_complex());
  const Scenario& scn = sig->scenario();
  std::mt19937 rng(21);
  for (Context u : scn.members()) {
    for (int trial = 0; trial < 5; ++trial) {
      SectionSet s(scn, u);
      std::bernoulli_distribution keep(0.5);
      for (std::size_t i = 0; i < s.cells(); ++i)
        if (keep(rng)) s.insert_index(i);
      Formula f = render_constraint(scn, s);
      EXPECT_TRUE(f.free_vars().subset_of(u));
      EXPECT_EQ(denote(*sig, f, u), s);
      EXPECT_EQ(denote(*sig, parse_formula(to_string(f, scn), *sig), u), s);
    }
  }
}

TEST(Theory, GammaAt) {
  auto ch = examples::charlie();
  const Theory& t = *ch.theory;
  const Scenario& scn = t.scenario();
  EXPECT_EQ(t.gamma_at(scn.context({"a1", "b1", "c"})), (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(t.gamma_at(scn.context({"a2", "b1", "c"})), (std::vector<std::size_t>{2}));
  EXPECT_TRUE(t.gamma_at(scn.context({"b2"})).empty());
}

TEST(SemanticsProperty, UpwardPersistenceOnArbitraryModels) {
  std::mt19937 rng(51);
  for (int trial = 0; trial < 150; ++trial) {
    auto scn = oracle::random_scenario(rng, 5, 4, 3);
    auto sig = sig_of(scn);
    auto a = oracle::random_model(rng, scn, 0.5);
    Formula f = oracle::random_fragment_formula(rng, *sig, 2);
    for (Context u : scn->members()) {
      if (!f.free_vars().subset_of(u) || !satisfies(a, *sig, f, u)) continue;
      for (Context v : scn->members())
        if (u.subset_of(v)) {
          EXPECT_TRUE(satisfies(a, *sig, f, v));
        }
    }
  }
}

TEST(SemanticsProperty, DownwardPersistenceOnNoSignallingModels) {
  std::mt19937 rng(53);
  int checked = 0;
  for (int trial = 0; trial < 150; ++trial) {
    auto scn = oracle::random_scenario(rng, 5, 4, 3);
    auto sig = sig_of(scn);
    auto a = ns_interior(oracle::random_model(rng, scn, 0.7));
    ASSERT_TRUE(is_no_signalling(a));
    Formula f = oracle::random_fragment_formula(rng, *sig, 2);
    for (Context v : scn->members()) {
      if (!f.free_vars().subset_of(v) || !satisfies(a, *sig, f, v)) continue;
      for (Context u : scn->complex().faces_of(v))
        if (f.free_vars().subset_of(u)) {
          EXPECT_TRUE(satisfies(a, *sig, f, u));
          ++checked;
        }
    }
  }
  EXPECT_GT(checked, 100);
}

TEST(Semantics, DownwardPersistenceFailsWhenSignalling) {
  auto se = examples::signal_e();
  const Signature& sig = se.theory->signature();
  const Scenario& scn = sig.scenario();
  Formula nb1 = parse_formula("~b1", sig);
  EXPECT_TRUE(satisfies(*se.model, sig, nb1, scn.context({"a2", "b1"})));
  EXPECT_FALSE(satisfies(*se.model, sig, nb1, scn.context({"b1"})));
}

TEST(SemanticsProperty, SatisfactionIsAntitone) {
  std::mt19937 rng(57);
  for (int trial = 0; trial < 150; ++trial) {
    auto scn = oracle::random_scenario(rng, 4, 3, 3);
    auto sig = sig_of(scn);
    auto b = oracle::random_model(rng, scn, 0.8);
    Formula f = oracle::random_fragment_formula(rng, *sig, 2);
    std::vector<PresheafModel> subs;
    oracle::for_each_ns_subpresheaf(b, [&](const PresheafModel& a) {
      if (subs.size() < 50) subs.push_back(a);
    });
    for (Context u : scn->members()) {
      if (!f.free_vars().subset_of(u) || !satisfies(b, *sig, f, u)) continue;
      for (const auto& a : subs) EXPECT_TRUE(satisfies(a, *sig, f, u));
    }
  }
}

TEST(SemanticsProperty, ExistsIsProjection) {
  std::mt19937 rng(59);
  auto sig = sig_of(examples::charlie_complex());
  const Scenario& scn = sig->scenario();
  Context v = scn.context({"a1", "b1", "c"}), u = scn.context({"a1", "b1"});
  for (int trial = 0; trial < 200; ++trial) {
    std::string text = oracle::random_formula(rng, scn.names_of(v), 2);
    Formula f = parse_formula(text, *sig);
    std::string bound = std::regex_replace(text, std::regex("\\bc\\b"), "y");
    Formula g = parse_formula("exists y : B . " + bound, *sig);
    EXPECT_TRUE(g.free_vars().subset_of(u));
    EXPECT_EQ(denote(*sig, g, u), image(scn, denote(*sig, f, v), u)) << text;
    Formula conj = Formula::conj(f, Formula::negate(g));
    EXPECT_EQ(denote(*sig, conj, v), intersection(denote(*sig, f, v), denote(*sig, Formula::negate(g), v)));
  }
}
