#include <gtest/gtest.h>

#include <random>

#include "ctxkit/ctxkit.hpp"
#include "oracles.hpp"

using namespace ctxkit;

namespace {

Context ctx(const ScenarioPtr& s, std::initializer_list<std::string_view> names) { return s->context(names); }

}  // namespace

TEST(Complex, SquareFacetsAndMembership) {
  auto sq = examples::square();
  EXPECT_EQ(sq->facets().size(), 4u);
  EXPECT_TRUE(sq->contains(ctx(sq, {"a1", "b1"})));
  EXPECT_FALSE(sq->contains(ctx(sq, {"a1", "a2"})));
  EXPECT_TRUE(sq->contains(Context{}));
  EXPECT_EQ(sq->members().size(), 9u);  // ∅, four vertices, four edges
}

TEST(Complex, OneVertex) {
  SimplicialComplex c(1, {Context::of({0})});
  ASSERT_EQ(c.members().size(), 2u);
  EXPECT_TRUE(c.members()[0].empty());
  ASSERT_EQ(c.codim1_pairs().size(), 1u);
  EXPECT_TRUE(c.codim1_pairs()[0].first.empty());
  EXPECT_EQ(c.codim1_pairs()[0].second, Context::of({0}));
}

TEST(Complex, CharlieFacesAndPairs) {
  auto ch = examples::charlie_complex();
  EXPECT_EQ(ch->facets().size(), 4u);
  EXPECT_EQ(ch->complex().faces_of(ctx(ch, {"a1", "b1", "c"})).size(), 8u);
  // 4 triangles x 3 edges, 8 distinct edges x 2 vertices, 5 vertices x 1.
  EXPECT_EQ(ch->complex().codim1_pairs().size(), 4u * 3 + 8u * 2 + 5u);
}

TEST(Complex, SquareCodimOnePairsIncludeVertexToEmpty) {
  auto sq = examples::square();
  // Each edge to its two vertices (8) plus each vertex to ∅ (4).
  EXPECT_EQ(sq->complex().codim1_pairs().size(), 12u);
}

TEST(Complex, FacesOfIsPowerSetInCanonicalOrder) {
  auto sq = examples::square();
  auto faces = sq->complex().faces_of(ctx(sq, {"a1", "b1"}));
  ASSERT_EQ(faces.size(), 4u);
  EXPECT_EQ(faces[0], Context{});
  EXPECT_EQ(faces[1], ctx(sq, {"a1"}));
  EXPECT_EQ(faces[2], ctx(sq, {"b1"}));
  EXPECT_EQ(faces[3], ctx(sq, {"a1", "b1"}));
  EXPECT_EQ(sq->complex().faces_of(Context{}).size(), 1u);
  EXPECT_THROW(sq->complex().faces_of(ctx(sq, {"a1", "a2"})), ScenarioError);
}

TEST(Complex, RedundantFacetsDropped) {
  SimplicialComplex c(3, {Context::of({0, 1}), Context::of({0}), Context::of({1, 2}), Context::of({0, 1})});
  EXPECT_EQ(c.facets().size(), 2u);
}

TEST(Complex, Errors) {
  EXPECT_THROW(SimplicialComplex(3, {Context::of({0, 1})}), ScenarioError);  // x2 uncovered
  EXPECT_THROW(SimplicialComplex(2, {Context::of({0, 1, 2})}), ScenarioError);
  EXPECT_THROW(make_scenario("s", {boolean_domain()}, {{"x", "B"}}, {{"y"}}), ScenarioError);
  EXPECT_THROW(make_scenario("s", {boolean_domain()}, {{"x", "C"}}, {{"x"}}), ScenarioError);
}

TEST(Complex, CanonicalOrderIsSizeThenDeclaration) {
  auto sq = examples::square();
  const auto& m = sq->members();
  for (std::size_t i = 1; i < m.size(); ++i) EXPECT_TRUE(CanonicalLess{}(m[i - 1], m[i]));
  EXPECT_EQ(m[1], ctx(sq, {"a1"}));
  EXPECT_EQ(m[5], ctx(sq, {"a1", "b1"}));
}

TEST(ComplexProperty, DownwardClosureAndPairsByBruteForce) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    auto scn = oracle::random_scenario(rng, 5, 4, 3);
    const auto& cplx = scn->complex();
    for (Context f : cplx.facets())
      for (Context g : cplx.facets())
        if (!(f == g)) {
          EXPECT_FALSE(f.subset_of(g));
        }
    std::uint64_t all = (std::uint64_t{1} << scn->num_vars()) - 1;
    std::size_t expected_pairs = 0;
    for (std::uint64_t m = 0; m <= all; ++m) {
      Context u(m);
      bool in = false;
      for (Context f : cplx.facets()) in = in || u.subset_of(f);
      EXPECT_EQ(cplx.contains(u), in);
      if (in) {
        for (Context v : cplx.faces_of(u)) EXPECT_TRUE(cplx.contains(v));
      }
      if (in) expected_pairs += u.size();
    }
    EXPECT_EQ(cplx.codim1_pairs().size(), expected_pairs);
    for (auto [u, v] : cplx.codim1_pairs()) {
      EXPECT_TRUE(u.proper_subset_of(v));
      EXPECT_EQ(v.size(), u.size() + 1);
      EXPECT_TRUE(cplx.contains(u));
      EXPECT_TRUE(cplx.contains(v));
    }
  }
}

TEST(Section, RestrictAndStrings) {
  auto sq = examples::square();
  Section s{ctx(sq, {"a1", "b1"}), {1, 1}};
  EXPECT_EQ(restrict_section(s, ctx(sq, {"a1"})), (Section{ctx(sq, {"a1"}), {1}}));
  EXPECT_EQ(restrict_section(s, s.context), s);
  EXPECT_EQ(restrict_section(s, Context{}), (Section{Context{}, {}}));
  EXPECT_THROW(restrict_section(s, ctx(sq, {"a2"})), ModelError);
  EXPECT_EQ(section_string(*sq, s), "11");
  EXPECT_EQ(parse_section_string(*sq, s.context, "11"), s);
  EXPECT_THROW(parse_section_string(*sq, s.context, "1"), ScenarioError);
  EXPECT_THROW(parse_section_string(*sq, s.context, "12"), ScenarioError);
}

TEST(Section, WideDomainsUseFixedWidthDigits) {
  auto scn = make_scenario("w", {cyclic_domain("Z", 12), boolean_domain()}, {{"x", "Z"}, {"y", "B"}}, {{"x", "y"}});
  Section s{scn->context({"x", "y"}), {3, 1}};
  EXPECT_EQ(section_string(*scn, s), "031");
  EXPECT_EQ(parse_section_string(*scn, s.context, "031"), s);
  EXPECT_THROW(parse_section_string(*scn, s.context, "121"), ScenarioError);
}

TEST(Section, ProductGuard) {
  // 128^3 = 2^21 cells at the facet, only 8 member contexts.
  auto scn = make_scenario("big", {cyclic_domain("Z128", 128)}, {{"x", "Z128"}, {"y", "Z128"}, {"z", "Z128"}}, {{"x", "y", "z"}});
  EXPECT_THROW(SectionSet(*scn, scn->universe()), ResourceError);
  EXPECT_NO_THROW(SectionSet(*scn, scn->context({"x", "y"})));
  EXPECT_THROW(PresheafModel::full(scn), ResourceError);
}

TEST(Complex, MemberGuard) {
  std::vector<Context> facets{Context((std::uint64_t{1} << 21) - 1)};
  EXPECT_THROW(SimplicialComplex(21, facets), ResourceError);
  EXPECT_NO_THROW(SimplicialComplex(12, {Context((std::uint64_t{1} << 12) - 1)}));
}

TEST(Section, ImagePreimageMatchOracle) {
  auto sq = examples::square();
  Context e = ctx(sq, {"a2", "b1"}), v = ctx(sq, {"b1"});
  SectionSet s = section_set_from_strings(*sq, e, {"00", "10"});
  EXPECT_EQ(section_strings(*sq, image(*sq, s, v)), (std::vector<std::string>{"0"}));
  SectionSet one = section_set_from_strings(*sq, v, {"1"});
  EXPECT_EQ(section_strings(*sq, preimage(*sq, one, e)), (std::vector<std::string>{"01", "11"}));
}
