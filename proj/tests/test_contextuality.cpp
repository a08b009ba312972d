#include <gtest/gtest.h>

#include <random>

#include "ctxkit/ctxkit.hpp"
#include "oracles.hpp"

using namespace ctxkit;

TEST(Join, FullSquareHasSixteenGlobalSections) {
  EXPECT_EQ(global_sections(*examples::square_full().model).size(), 16u);
  EXPECT_FALSE(contextuality(*examples::square_full().model).logically_contextual);
}

TEST(Contextuality, Hardy) {
  auto m = *examples::hardy().model;
  auto r = contextuality(m);
  EXPECT_TRUE(r.logically_contextual);
  EXPECT_FALSE(r.strongly_contextual);
  EXPECT_FALSE(r.global_sections.empty());
  const Scenario& scn = m.scenario();
  Section s11{scn.context({"a1", "b1"}), {1, 1}};
  EXPECT_FALSE(extend_section(m, s11).has_value());
  const SectionSet& miss = r.non_extending[scn.index_of(scn.context({"a1", "b1"}))];
  EXPECT_EQ(section_strings(scn, miss), (std::vector<std::string>{"11"}));
}

TEST(Contextuality, PrBoxStrong) {
  auto m = *examples::pr_box().model;
  EXPECT_TRUE(global_sections(m).empty());
  EXPECT_TRUE(is_strongly_contextual(m));
  EXPECT_TRUE(is_logically_contextual(m));
}

TEST(Contextuality, EmptyModelIsNotStronglyContextual) {
  auto e = PresheafModel::empty(examples::square());
  auto r = contextuality(e);
  EXPECT_TRUE(r.empty_model);
  EXPECT_FALSE(r.strongly_contextual);
  EXPECT_FALSE(r.logically_contextual);
  EXPECT_TRUE(r.global_sections.empty());
}

TEST(Contextuality, MerminIsStronglyContextual) {
  EXPECT_TRUE(is_strongly_contextual(*examples::mermin().model));
}

TEST(Join, ExtendSectionFindsWitness) {
  auto m = *examples::hardy().model;
  const Scenario& scn = m.scenario();
  auto g = extend_section(m, Section{scn.context({"a1", "b1"}), {0, 0}});
  ASSERT_TRUE(g.has_value());
  EXPECT_EQ(restrict_section(*g, scn.context({"a1", "b1"})), (Section{scn.context({"a1", "b1"}), {0, 0}}));
  for (Context u : scn.members()) EXPECT_TRUE(m.at(u).contains(restrict_section(*g, u)));
}

TEST(JoinProperty, BacktrackingMatchesBruteForce) {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    auto scn = oracle::random_scenario(rng, 5, 4, 3);
    auto a = oracle::random_model(rng, scn, trial % 2 ? 0.5 : 0.85);
    auto fast = global_sections(a);
    auto slow = oracle::join(a);
    EXPECT_EQ(fast, slow);
    EXPECT_EQ(global_sections_exhaustive(a), slow);
    auto r = contextuality(a);
    bool logical = false;
    for (Context u : scn->members())
      for (const Section& s : a.at(u).sections()) {
        bool ext = false;
        for (const Section& g : slow) ext = ext || restrict_section(g, u) == s;
        logical = logical || !ext;
      }
    EXPECT_EQ(r.logically_contextual, logical);
    EXPECT_EQ(r.strongly_contextual, !a.is_empty() && slow.empty());
  }
}
