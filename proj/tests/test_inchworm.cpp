#include <gtest/gtest.h>

#include <random>

#include "ctxkit/ctxkit.hpp"
#include "oracles.hpp"

using namespace ctxkit;

namespace {

/// Random theory over the square: one to three formulas, each inside a random member.
Theory random_theory(std::mt19937& rng, const SignaturePtr& sig) {
  std::uniform_int_distribution<int> n(1, 3);
  std::vector<Formula> fs;
  int count = n(rng);
  for (int i = 0; i < count; ++i) fs.push_back(oracle::random_fragment_formula(rng, *sig, 2));
  return Theory(sig, fs);
}

/// Γ ⊨_NS φ by enumerating every no-signalling model of Γ (all lie under M[F]Γ).
bool ns_entails_oracle(const Theory& gamma, const Formula& goal) {
  oracle::SubpresheafWalk walk(mm_model(gamma));
  auto truth = walk.truth_masks(gamma.signature(), goal);
  bool all = true;
  walk.run_no_signalling([&](const oracle::SubpresheafWalk::Family& b) {
    all = all && oracle::SubpresheafWalk::satisfies(b, truth);
  });
  return all;
}

}  // namespace

TEST(Mm, PrTheoryGivesPrBox) {
  auto pr = examples::pr_box();
  EXPECT_EQ(mm_model(*pr.theory), *pr.model);
  EXPECT_TRUE(is_saturated(*pr.theory));
  EXPECT_FALSE(is_saturated(*examples::signal_e().theory));
}

TEST(Mm, HardyTheoryGivesHardyModel) {
  auto h = examples::hardy();
  EXPECT_EQ(mm_model(*h.theory), *h.model);
}

TEST(Mm, EmptyTheoryGivesFullModel) {
  auto sq = examples::square();
  Theory t(std::make_shared<const Signature>(sq), {});
  EXPECT_EQ(mm_model(t), PresheafModel::full(sq));
  EXPECT_TRUE(is_saturated(t));
}

TEST(Interior, SignalEForcesB1Zero) {
  auto se = examples::signal_e();
  auto r = ns_interior_with_provenance(*se.model);
  const Scenario& scn = r.model.scenario();
  EXPECT_EQ(section_strings(scn, r.model.at(scn.context({"a1", "b1"}))), (std::vector<std::string>{"00", "10"}));
  EXPECT_EQ(section_strings(scn, r.model.at(scn.context({"b1"}))), (std::vector<std::string>{"0"}));
  EXPECT_TRUE(is_no_signalling(r.model));
  EXPECT_FALSE(r.events.empty());
  for (const auto& e : r.events) EXPECT_FALSE(e.removed.empty());
}

TEST(Interior, NoSignallingModelUnchanged) {
  auto pr = *examples::pr_box().model;
  auto r = ns_interior_with_provenance(pr);
  EXPECT_EQ(r.model, pr);
  EXPECT_TRUE(r.events.empty());
  EXPECT_EQ(r.passes, 1u);
}

TEST(Interior, ContradictionEmptiesEverything) {
  auto sq = examples::square();
  auto sig = std::make_shared<const Signature>(sq);
  Theory t = parse_theory(sig, {"a1 = 0", "a1 = 1"});
  auto in = ns_interior(mm_model(t));
  EXPECT_TRUE(in.is_empty());
  for (const auto& s : in.sets()) EXPECT_TRUE(s.empty());
}

TEST(InteriorProperty, GreatestAndIdempotent) {
  std::mt19937 rng(17);
  int walked = 0;
  for (int trial = 0; trial < 150; ++trial) {
    auto scn = oracle::random_scenario(rng, 4, 3, 3);
    auto a = oracle::random_model(rng, scn, 0.5);
    auto in = ns_interior(a);
    EXPECT_TRUE(is_no_signalling(in));
    EXPECT_TRUE(is_subpresheaf(in, a));
    EXPECT_EQ(ns_interior(in), in);
    oracle::SubpresheafWalk walk(a);
    auto target = walk.family_of(in);
    int found = 0;
    walk.run_no_signalling([&](const oracle::SubpresheafWalk::Family& b) {
      EXPECT_TRUE(oracle::SubpresheafWalk::below(b, target));
      found += b == target;
    });
    EXPECT_EQ(found, 1);
    if (oracle::count_subpresheaves(a, 100000) > 100000) continue;
    ++walked;
    walk.run([&](const oracle::SubpresheafWalk::Family& b) {
      if (!oracle::SubpresheafWalk::below(b, target)) {
        EXPECT_FALSE(walk.no_signalling(b));
      }
    });
  }
  EXPECT_GT(walked, 50);
}

TEST(Entail, CharlieTrace) {
  auto ch = examples::charlie();
  const Theory& t = *ch.theory;
  const Scenario& scn = t.scenario();
  Formula goal = parse_formula("a2 = c", t.signature());
  auto r = inchworm_entails(t, goal);
  ASSERT_TRUE(r.entailed);
  ASSERT_TRUE(r.trace.has_value());
  const auto& steps = r.trace->steps;
  ASSERT_EQ(steps.size(), 3u);
  EXPECT_EQ(steps[0].context, scn.context({"a1", "b1", "c"}));
  EXPECT_EQ(steps[0].direction, Direction::Meet);
  EXPECT_EQ(steps[0].formulas, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(section_strings(scn, steps[0].constraint), (std::vector<std::string>{"000", "111"}));
  EXPECT_EQ(steps[1].context, scn.context({"b1", "c"}));
  EXPECT_EQ(steps[1].direction, Direction::ProjectDown);
  EXPECT_EQ(section_strings(scn, steps[1].constraint), (std::vector<std::string>{"00", "11"}));
  EXPECT_EQ(steps[2].context, scn.context({"a2", "b1", "c"}));
  EXPECT_EQ(steps[2].direction, Direction::LiftUp);
  EXPECT_EQ(steps[2].formulas, (std::vector<std::size_t>{2}));
  EXPECT_EQ(section_strings(scn, steps[2].constraint), (std::vector<std::string>{"000", "111"}));
  EXPECT_EQ(r.trace->conclusion_context, scn.context({"a2", "b1", "c"}));
  EXPECT_TRUE(validate_trace(t, *r.trace).valid);
  EXPECT_TRUE(global_entails(t.signature(), t.formulas(), goal, scn.universe()));
}

TEST(Entail, CharlieNonEntailment) {
  auto ch = examples::charlie();
  const Theory& t = *ch.theory;
  auto r = inchworm_entails(t, parse_formula("a2 = b2", t.signature()));
  EXPECT_FALSE(r.entailed);
  ASSERT_TRUE(r.countermodel.has_value());
  EXPECT_TRUE(is_no_signalling(*r.countermodel));
  EXPECT_THROW(inchworm_entails(t, parse_formula("a1 = a2", t.signature())), LogicError);
}

TEST(Entail, TamperedTracesAreRejected) {
  auto ch = examples::charlie();
  const Theory& t = *ch.theory;
  auto r = inchworm_entails(t, parse_formula("a2 = c", t.signature()));
  ASSERT_TRUE(r.trace);
  auto bad = *r.trace;
  bad.steps[1].constraint = section_set_from_strings(t.scenario(), bad.steps[1].context, {"00"});
  EXPECT_FALSE(validate_trace(t, bad).valid);
  auto cut = *r.trace;
  cut.steps.erase(cut.steps.begin());
  EXPECT_FALSE(validate_trace(t, cut).valid);
  auto wrong_goal = *r.trace;
  wrong_goal.goal = parse_formula("a2 = 1", t.signature());
  EXPECT_FALSE(validate_trace(t, wrong_goal).valid);
  auto no_premise = *r.trace;
  no_premise.steps[2].formulas.clear();
  EXPECT_FALSE(validate_trace(t, no_premise).valid);
}

TEST(Entail, SignalEDerivesNotB1Everywhere) {
  auto se = examples::signal_e();
  const Theory& t = *se.theory;
  auto r = inchworm_entails(t, parse_formula("~b1", t.signature()));
  ASSERT_TRUE(r.entailed);
  EXPECT_TRUE(validate_trace(t, *r.trace).valid);
  // The explicit model satisfies Γ yet not ~b1 on {a1 b1}: it signals.
  EXPECT_FALSE(satisfies(*se.model, t.signature(), parse_formula("~b1", t.signature())));
}

TEST(EntailProperty, SoundAndCompleteAgainstNsModels) {
  std::mt19937 rng(23);
  auto sig = std::make_shared<const Signature>(examples::square());
  int entailed = 0;
  for (int trial = 0; trial < 150; ++trial) {
    Theory t = random_theory(rng, sig);
    Formula goal = oracle::random_fragment_formula(rng, *sig, 2);
    auto r = inchworm_entails(t, goal);
    EXPECT_EQ(r.entailed, ns_entails_oracle(t, goal)) << to_string(goal, sig->scenario());
    if (r.entailed) {
      ++entailed;
      ASSERT_TRUE(r.trace);
      auto check = validate_trace(t, *r.trace);
      EXPECT_TRUE(check.valid) << check.reason;
      EXPECT_TRUE(global_entails(*sig, t.formulas(), goal, sig->scenario().universe()));
    }
    EXPECT_EQ(r.entailed, filter_satisfies(filtmm(t), *sig, goal));
  }
  EXPECT_GT(entailed, 10);
}

TEST(Filter, FiltmmIsTheLeastFilterModel) {
  std::mt19937 rng(29);
  auto sig = std::make_shared<const Signature>(examples::square());
  for (int trial = 0; trial < 60; ++trial) {
    Theory t = random_theory(rng, sig);
    FilterModel g = filtmm(t);
    EXPECT_TRUE(is_filter_model(g, t));
    oracle::for_each_ns_subpresheaf(mm_model(t), [&](const PresheafModel& b) {
      FilterModel h = filter_model_of(b);
      if (!is_filter_model(h, t)) return;
      // A larger generator is a smaller filter.
      for (std::size_t i = 0; i < b.sets().size(); ++i) EXPECT_TRUE(h.generators[i].subset_of(g.generators[i]));
    });
  }
}

TEST(Filter, RejectsNonFilterFamilies) {
  auto se = examples::signal_e();
  EXPECT_FALSE(is_filter_model(filter_model_of(*se.model), *se.theory));
  EXPECT_TRUE(is_filter_model(filtmm(*se.theory), *se.theory));
}

TEST(Spiral, InteriorEmptyAndIterationsGrow) {
  std::size_t prev = 0;
  for (std::size_t k : {2u, 4u, 8u}) {
    SpiralReport r = spiral_demo(k);
    EXPECT_TRUE(r.interior_empty) << k;
    EXPECT_GT(r.iterations, prev);
    prev = r.iterations;
  }
  EXPECT_GE(spiral_demo(8).iterations, 8u);
  EXPECT_FALSE(spiral_demo(2, false).interior_empty);
  EXPECT_THROW(make_spiral_theory(1), LogicError);
}

TEST(Spiral, GloballyInconsistent) {
  Theory t = make_spiral_theory(4);
  EXPECT_FALSE(global_consistency(t).consistent);
  EXPECT_TRUE(inchworm_entails(t, Formula::bot()).entailed);
}
