//------------------------------------------------------------------------------
//
//   Copyright 2026 The mechlab Authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------

#include "mechlab/lp.hpp"
#include "mechlab/rational.hpp"

#include <gtest/gtest.h>

#include <array>
#include <optional>
#include <random>
#include <stdexcept>

namespace mechlab {
namespace {

TEST(Rational, ParseAndPrintCanonical) {
  EXPECT_EQ(to_string(parse_rational("6/4")), "3/2");
  EXPECT_EQ(to_string(parse_rational(" -2/4 ")), "-1/2");
  EXPECT_EQ(to_string(parse_rational("8/4")), "2");
  EXPECT_EQ(to_string(parse_rational("-7")), "-7");
  EXPECT_EQ(parse_rational("0/5"), Rational(0));
}

TEST(Rational, ParseRejectsMalformed) {
  EXPECT_THROW(parse_rational("1/0"), std::invalid_argument);
  EXPECT_THROW(parse_rational(""), std::invalid_argument);
  EXPECT_THROW(parse_rational("1.5"), std::invalid_argument);
  EXPECT_THROW(parse_rational("a/2"), std::invalid_argument);
  EXPECT_THROW(parse_rational("1/2/3"), std::invalid_argument);
  EXPECT_THROW(parse_rational("2/-4"), std::invalid_argument);
}

TEST(Rational, DoubleRoundTripIsExact) {
  for (double d : {0.0, 0.5, -0.125, 3.0, 1e-3, 12345.678}) {
    EXPECT_EQ(to_double(from_double(d)), d);
  }
  EXPECT_EQ(from_double(0.375), make_rational(3, 8));
}

TEST(Rational, MakeRationalCanonicalizes) {
  EXPECT_EQ(make_rational(4, -8), make_rational(-1, 2));
  EXPECT_EQ(make_rational(4, -8).get_den(), 2);
  EXPECT_THROW(make_rational(1, 0), std::invalid_argument);
}

TEST(Price, InfinityOrdersAboveEveryRational) {
  const Price inf = Price::infinity();
  EXPECT_TRUE(Price(1000000) < inf);
  EXPECT_EQ(inf, Price::infinity());
  EXPECT_EQ(min(inf, Price(3)), Price(3));
  EXPECT_EQ(to_string(inf), "inf");
  EXPECT_EQ(parse_price("inf"), inf);
  EXPECT_EQ(parse_price("5/10"), Price(make_rational(1, 2)));
  EXPECT_THROW(inf.value(), std::logic_error);
}

TEST(Rational, DotAndSum) {
  const RationalVector a{make_rational(1, 2), Rational(2)};
  const RationalVector b{Rational(4), make_rational(1, 3)};
  EXPECT_EQ(dot(a, b), make_rational(8, 3));
  EXPECT_EQ(sum(a), make_rational(5, 2));
}

TEST(Lp, SmallMaximization) {
  // max 3x + 2y s.t. x + y <= 4, x + 3y <= 6, x <= 3.
  LinearProgram lp(RationalVector{3, 2});
  lp.add_constraint({1, 1}, Relation::LessEqual, 4);
  lp.add_constraint({1, 3}, Relation::LessEqual, 6);
  lp.add_constraint({1, 0}, Relation::LessEqual, 3);
  const LpResult r = lp_solve(lp);
  ASSERT_EQ(r.status, LpStatus::Optimal);
  EXPECT_EQ(r.value, Rational(11));
  EXPECT_EQ(r.primal[0], Rational(3));
  EXPECT_EQ(r.primal[1], Rational(1));
  EXPECT_TRUE(verify_certificate(lp, r).empty());
}

TEST(Lp, EqualityAndGreaterEqualRows) {
  // min x + y as max -(x + y) s.t. x + 2y >= 2, x - y == 1/2.
  LinearProgram lp(RationalVector{-1, -1});
  lp.add_constraint({1, 2}, Relation::GreaterEqual, 2);
  lp.add_constraint({1, -1}, Relation::Equal, make_rational(1, 2));
  const LpResult r = lp_solve(lp);
  ASSERT_EQ(r.status, LpStatus::Optimal);
  EXPECT_EQ(r.primal[0], Rational(1));
  EXPECT_EQ(r.primal[1], make_rational(1, 2));
  EXPECT_EQ(r.value, make_rational(-3, 2));
  EXPECT_LE(r.dual[0], 0);
}

TEST(Lp, DetectsInfeasibleAndUnbounded) {
  LinearProgram infeasible(RationalVector{1});
  infeasible.add_constraint({1}, Relation::GreaterEqual, 2);
  infeasible.add_constraint({1}, Relation::LessEqual, 1);
  EXPECT_EQ(lp_solve(infeasible).status, LpStatus::Infeasible);

  LinearProgram unbounded(RationalVector{1, 1});
  unbounded.add_constraint({1, -1}, Relation::LessEqual, 1);
  EXPECT_EQ(lp_solve(unbounded).status, LpStatus::Unbounded);
}

TEST(Lp, FreeAndBoundedVariables) {
  // max -|x - 3| style: max t s.t. t <= x - 3, t <= 3 - x, x free, t free.
  LinearProgram lp(RationalVector{0, 1});
  lp.lower = {std::nullopt, std::nullopt};
  lp.upper = {std::nullopt, std::nullopt};
  lp.add_constraint({-1, 1}, Relation::LessEqual, -3);
  lp.add_constraint({1, 1}, Relation::LessEqual, 3);
  const LpResult r = lp_solve(lp);
  ASSERT_EQ(r.status, LpStatus::Optimal);
  EXPECT_EQ(r.value, Rational(0));
  EXPECT_EQ(r.primal[0], Rational(3));

  LinearProgram capped(RationalVector{1});
  capped.upper = {make_rational(5, 2)};
  EXPECT_EQ(lp_solve(capped).value, make_rational(5, 2));
}

TEST(Lp, DegenerateProblemTerminates) {
  // Classic cycling example under naive pivoting; Bland's rule must finish.
  LinearProgram lp(RationalVector{make_rational(3, 4), Rational(-150), make_rational(1, 50), Rational(-6)});
  lp.add_constraint({make_rational(1, 4), Rational(-60), make_rational(-1, 25), Rational(9)}, Relation::LessEqual, 0);
  lp.add_constraint({make_rational(1, 2), Rational(-90), make_rational(-1, 50), Rational(3)}, Relation::LessEqual, 0);
  lp.add_constraint({0, 0, 1, 0}, Relation::LessEqual, 1);
  const LpResult r = lp_solve(lp);
  ASSERT_EQ(r.status, LpStatus::Optimal);
  EXPECT_EQ(r.value, make_rational(1, 20));
}

TEST(Lp, CertificateCatchesWrongPrimal) {
  LinearProgram lp(RationalVector{1, 1});
  lp.add_constraint({1, 1}, Relation::LessEqual, 1);
  LpResult r = lp_solve(lp);
  ASSERT_EQ(r.status, LpStatus::Optimal);
  r.primal = {Rational(1), Rational(1)};
  EXPECT_FALSE(verify_certificate(lp, r).empty());
}

// Property: on random bounded LPs the optimum matches the best vertex of the
// feasible box found by brute force on a 2-variable grid of constraint
// intersections, and every solve is certified.
TEST(Lp, RandomTwoVariableProblemsMatchVertexEnumeration) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<long> coef(-4, 4);
  std::uniform_int_distribution<long> bound(1, 9);
  const LpCounters before = lp_counters();
  int optimal = 0;
  for (int trial = 0; trial < 200; ++trial) {
    LinearProgram lp(RationalVector{Rational(coef(rng)), Rational(coef(rng))});
    std::vector<std::array<Rational, 3>> rows;
    for (int k = 0; k < 3; ++k) {
      const Rational a(coef(rng));
      const Rational b(coef(rng));
      const Rational c(bound(rng));
      lp.add_constraint({a, b}, Relation::LessEqual, c);
      rows.push_back({a, b, c});
    }
    lp.upper = {Rational(10), Rational(10)};
    rows.push_back({1, 0, 10});
    rows.push_back({0, 1, 10});
    rows.push_back({-1, 0, 0});
    rows.push_back({0, -1, 0});
    const LpResult r = lp_solve(lp);
    ASSERT_NE(r.status, LpStatus::Unbounded);
    // Every vertex of the polygon is an intersection of two boundary lines.
    std::optional<Rational> best;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (std::size_t k = i + 1; k < rows.size(); ++k) {
        const Rational det = rows[i][0] * rows[k][1] - rows[i][1] * rows[k][0];
        if (det == 0) continue;
        const Rational x = (rows[i][2] * rows[k][1] - rows[i][1] * rows[k][2]) / det;
        const Rational y = (rows[i][0] * rows[k][2] - rows[i][2] * rows[k][0]) / det;
        bool feasible = true;
        for (const auto& row : rows) feasible = feasible && row[0] * x + row[1] * y <= row[2];
        if (!feasible) continue;
        const Rational value = lp.objective[0] * x + lp.objective[1] * y;
        if (!best || value > *best) best = value;
      }
    }
    if (!best) {
      EXPECT_EQ(r.status, LpStatus::Infeasible);
      continue;
    }
    ASSERT_EQ(r.status, LpStatus::Optimal);
    EXPECT_EQ(r.value, *best);
    ++optimal;
  }
  const LpCounters after = lp_counters();
  EXPECT_EQ(after.solves - before.solves, 200U);
  EXPECT_EQ(after.optimal - before.optimal, static_cast<std::uint64_t>(optimal));
  EXPECT_EQ(after.certified - before.certified, static_cast<std::uint64_t>(optimal));
}

}  // namespace
}  // namespace mechlab
