#include <gtest/gtest.h>

#include "hypofrac/hormander.hpp"

using namespace hypofrac;
using namespace hypofrac::hormander;
using poly::Polynomial;

namespace {
Vec pt(std::initializer_list<double> v) {
  Vec x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double c : v) x[i++] = c;
  return x;
}
}  // namespace

TEST(BracketSets, LevelOneWithDrift) {
  auto s = poly::systems::elliptic(2);
  s.drift = poly::VectorField{Polynomial::variable(2, 1), Polynomial::constant(2, 1.0)};
  const auto b = bracket_sets(s, 1, Mode::weak);
  ASSERT_EQ(b.size(), 3u);
  EXPECT_EQ(b[0].word, (Word{0}));
  EXPECT_EQ(b[1].word, (Word{1}));
  EXPECT_EQ(b[2].word, (Word{2}));
  EXPECT_EQ(b[0].field, *s.drift);
}

TEST(BracketSets, HeisenbergBracket) {
  const auto b = bracket_sets(poly::systems::heisenberg(), 2, Mode::weak);
  bool found = false;
  for (const auto& bf : b) {
    if (bf.word == Word{1, 2}) {
      found = true;
      EXPECT_EQ(bf.field, (poly::VectorField{Polynomial(3), Polynomial(3), Polynomial::constant(3, 1.0)}));
    }
  }
  EXPECT_TRUE(found);
}

TEST(BracketSets, AbelianHasNoHigherBrackets) {
  for (const auto& bf : bracket_sets(poly::systems::elliptic(3), 4, Mode::weak)) EXPECT_EQ(bf.word.size(), 1u);
}

TEST(BracketSets, WordCapGuard) {
  EXPECT_THROW(bracket_sets(poly::systems::elliptic(4), 10, Mode::weak, 1000), NumericalError);
  EXPECT_THROW(bracket_sets(poly::systems::elliptic(2), 0), DomainError);
}

TEST(HormanderCheck, CanonicalExamples) {
  const auto e = hormander_check(poly::systems::elliptic(3), Vec::Zero(3), 5);
  EXPECT_TRUE(e.satisfied);
  EXPECT_EQ(e.n_star, 1u);
  const auto h = hormander_check(poly::systems::heisenberg(), Vec::Zero(3), 5);
  EXPECT_TRUE(h.satisfied);
  EXPECT_EQ(h.n_star, 2u);
  EXPECT_EQ(h.witnesses.back(), (Word{1, 2}));
  const auto r = hormander_check(poly::systems::rank_deficient(), Vec::Zero(2), 6);
  EXPECT_FALSE(r.satisfied);
  EXPECT_EQ(r.n_star, 0u);
  EXPECT_EQ(r.ranks.back(), 1u);
}

TEST(HormanderCheck, InvariantUnderFieldBasisChange) {
  auto s = poly::systems::heisenberg();
  auto t = s;
  t.fields[0] = s.fields[0] + 2.0 * s.fields[1];
  t.fields[1] = -1.0 * s.fields[1] + 0.5 * s.fields[0];
  for (const Vec& x : {Vec(Vec::Zero(3)), pt({0.3, -1.0, 2.0})}) {
    EXPECT_EQ(hormander_check(s, x, 4).n_star, hormander_check(t, x, 4).n_star);
  }
}

TEST(HormanderCheck, DriftOnlyInWeakMode) {
  // V1 = d/dx, drift = x d/dy: the drift bracket fills the span only in weak mode.
  poly::VectorFieldSystem s;
  s.n = 2;
  s.d = 1;
  s.fields.push_back({Polynomial::constant(2, 1.0), Polynomial(2)});
  s.drift = poly::VectorField{Polynomial(2), Polynomial::variable(2, 0)};
  EXPECT_TRUE(hormander_check(s, Vec::Zero(2), 3, Mode::weak).satisfied);
  EXPECT_FALSE(hormander_check(s, Vec::Zero(2), 3, Mode::strong).satisfied);
}

TEST(Flag, GrowthVectorsAndDimension) {
  const auto e = strong_hormander_flag(poly::systems::elliptic(3), Vec::Zero(3), 4);
  EXPECT_EQ(e.growth, (std::vector<std::size_t>{3}));
  EXPECT_EQ(e.r, 1u);
  EXPECT_EQ(*e.D, 3u);
  const auto h = strong_hormander_flag(poly::systems::heisenberg(), Vec::Zero(3), 4);
  EXPECT_EQ(h.growth, (std::vector<std::size_t>{2, 3}));
  EXPECT_EQ(*h.D, 4u);
  EXPECT_EQ(*h.D_displayed, 8u);
  EXPECT_TRUE(*h.regular);
  const auto g0 = strong_hormander_flag(poly::systems::grushin(), pt({0, 0}), 4);
  EXPECT_EQ(g0.growth, (std::vector<std::size_t>{1, 2}));
  EXPECT_EQ(*g0.D, 3u);
  EXPECT_FALSE(*g0.regular);
  const auto g1 = strong_hormander_flag(poly::systems::grushin(), pt({1, 0}), 4);
  EXPECT_EQ(g1.growth, (std::vector<std::size_t>{2}));
  EXPECT_EQ(*g1.D, 2u);
  const auto r = strong_hormander_flag(poly::systems::rank_deficient(), Vec::Zero(2), 4);
  EXPECT_FALSE(r.full_rank);
  EXPECT_FALSE(r.regular.has_value());
  EXPECT_FALSE(r.D.has_value());
}

TEST(Flag, DimensionAtLeastNWithEqualityIffElliptic) {
  for (const auto& [sys, x] : {std::pair{poly::systems::heisenberg(), Vec(Vec::Zero(3))},
                               std::pair{poly::systems::grushin(), pt({0, 0})},
                               std::pair{poly::systems::elliptic(2), pt({0.2, 0})}}) {
    const auto f = strong_hormander_flag(sys, x, 5);
    EXPECT_GE(*f.D, sys.n);
    EXPECT_EQ(*f.D == sys.n, f.r == 1);
    for (std::size_t k = 1; k < f.growth.size(); ++k) EXPECT_LE(f.growth[k - 1], f.growth[k]);
  }
}

TEST(Flag, MatchesStrongCheckAtRegularPoint) {
  const auto h = strong_hormander_flag(poly::systems::quadratic(), pt({0.4, -0.2}), 5);
  const auto c = hormander_check(poly::systems::quadratic(), pt({0.4, -0.2}), 5, Mode::strong);
  if (h.regular && *h.regular) EXPECT_EQ(h.r, c.n_star);
}

TEST(RegularPoint, Examples) {
  EXPECT_TRUE(regular_point_check(poly::systems::elliptic(2), pt({0.5, 1}), 0.1, 16).regular);
  const auto g = regular_point_check(poly::systems::grushin(), pt({0, 0}), 0.1, 16);
  EXPECT_FALSE(g.regular);
  ASSERT_TRUE(g.witness_growth.has_value());
  EXPECT_EQ(*g.witness_growth, (std::vector<std::size_t>{2}));
  EXPECT_TRUE(regular_point_check(poly::systems::heisenberg(), Vec::Zero(3), 0.1, 16).regular);
  EXPECT_THROW(regular_point_check(poly::systems::heisenberg(), Vec::Zero(3), 0.0, 16), DomainError);
}

TEST(Rank, Threshold) {
  Mat m(3, 2);
  m << 1, 1, 0, 1e-14, 0, 0;
  EXPECT_EQ(numerical_rank(m), 1u);
  m(1, 1) = 1e-6;
  EXPECT_EQ(numerical_rank(m), 2u);
  EXPECT_EQ(numerical_rank(Mat::Zero(3, 3)), 0u);
}
