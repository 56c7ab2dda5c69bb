// Copyright 2026 The martprice Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <random>

#include <gtest/gtest.h>

#include "martprice/arbitrage.hpp"
#include "martprice/pinv.hpp"
#include "martprice/simplex.hpp"
#include "oracles.hpp"

namespace martprice {
namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

PriceSystem two_by_two() {
  Matrix s(2, 2);
  s << 1, 1, 2, 0.5;
  return PriceSystem(Vector::Ones(2), s);
}

PriceSystem skewed() {
  Matrix s(2, 3);
  s << 1, 1, 1, 0, 0.1, 10;
  return PriceSystem(vec({1, 0.04}), s);
}

TEST(PinvSolve, IdentityPayoff) {
  const PinvReport r = pinv_solve(PriceSystem(vec({0.5, 0.5}), Matrix::Identity(2, 2)));
  EXPECT_TRUE(r.q_plus.isApprox(vec({0.5, 0.5}), 1e-15));
  EXPECT_TRUE(r.is_complete);
  EXPECT_TRUE(r.is_least_squares_market);
  EXPECT_NEAR(r.gamma, 1.0, 1e-15);
  EXPECT_NEAR(r.kappa, 1.0, 1e-15);
  EXPECT_EQ(r.rank, 2);
}

TEST(PinvSolve, CompleteTwoByTwo) {
  const PinvReport r = pinv_solve(two_by_two());
  EXPECT_NEAR(r.q_plus[0], 1.0 / 3.0, 1e-14);
  EXPECT_NEAR(r.q_plus[1], 2.0 / 3.0, 1e-14);
  EXPECT_TRUE(r.is_least_squares_market);
  EXPECT_TRUE(r.is_complete);
  EXPECT_NEAR(r.distance_to_feasible, 0.0, 1e-12);
}

TEST(PinvSolve, SkewedMarketIsNotLeastSquaresButArbitrageFree) {
  const PriceSystem ps = skewed();
  const PinvReport r = pinv_solve(ps);
  const Vector oracle = testing::normal_equation_pinv(ps.payoffs(), ps.prices());
  EXPECT_TRUE(r.q_plus.isApprox(oracle, 1e-12));
  EXPECT_NEAR(r.q_plus[2], -0.00098, 1e-5);
  EXPECT_FALSE(r.is_least_squares_market);
  EXPECT_FALSE(r.in_closed_set);
  EXPECT_FALSE(r.is_complete);
  EXPECT_GT(r.distance_to_feasible, 0.0);
  EXPECT_TRUE(std::isfinite(r.distance_to_feasible));
  EXPECT_FALSE(has_arbitrage(detect_arbitrage(ps)));
  // A hand-picked measure confirms feasibility.
  const auto q = MartingaleMeasure::evaluate(ps, vec({0.699, 0.3, 0.001}));
  EXPECT_LT(q.residual_inf, 1e-12);
}

TEST(PinvPrice, CompleteAndConstant) {
  EXPECT_NEAR(pinv_price(two_by_two(), Derivative(vec({2, 0.5}))).price, 1.0, 1e-14);
  EXPECT_NEAR(pinv_price(two_by_two(), Derivative(vec({3, 3}))).price, 3.0, 1e-14);
}

TEST(PinvPrice, NotLeastSquaresCarriesReport) {
  try {
    pinv_price(skewed(), Derivative(vec({0, 0, 1})));
    FAIL() << "expected NotLeastSquaresError";
  } catch (const NotLeastSquaresError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNotLeastSquares);
    EXPECT_EQ(exit_code(e.kind()), 4);
    EXPECT_LT(e.report().min_entry, 0.0);
  }
}

TEST(GammaKappa, FullRowRankAndOrthogonal) {
  EXPECT_NEAR(gamma_kappa(skewed()).first, 1.0, 1e-14);
  // Pi orthogonal to the column space of a rank-one payoff.
  Matrix s(2, 2);
  s << 1, 1, 0, 0;
  const auto [gamma, kappa] = gamma_kappa(PriceSystem(vec({0, 1}), s));
  EXPECT_NEAR(gamma, 0.0, 1e-15);
  EXPECT_NEAR(kappa, 1.0, 1e-15);
  std::mt19937_64 rng(2);
  EXPECT_NEAR(gamma_kappa(testing::random_complete(rng, 4)).first, 1.0, 1e-12);
}

TEST(GammaKappa, RankDeficientPartialProjection) {
  // Column space spanned by (1, 1, 1); Pi = (1, 0, 0) projects to 1/3.
  const PriceSystem ps(vec({1, 0, 0}), Matrix::Ones(3, 2));
  const auto [gamma, kappa] = gamma_kappa(ps);
  EXPECT_NEAR(gamma, 1.0 / 3.0, 1e-14);
  EXPECT_NEAR(kappa, 1.0, 1e-14);
  EXPECT_EQ(pinv_solve(ps).rank, 1);
}

TEST(PinvProperty, MinimumNormAmongFeasiblePoints) {
  std::mt19937_64 rng(1001);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    const Index m = 2 + t % 3;
    const Index k = m + 1 + t % 4;
    const PriceSystem ps = testing::random_arbitrage_free(rng, m, k);
    const PinvReport r = pinv_solve(ps);
    EXPECT_TRUE(r.q_plus.isApprox(testing::normal_equation_pinv(ps.payoffs(), ps.prices()), 1e-9));
    const auto vb = testing::enumerate_vertices(ps, Vector::Zero(k));
    ASSERT_TRUE(vb.feasible());
    for (const Vector& v : vb.vertices) EXPECT_LE(r.q_plus.norm(), v.norm() + 1e-9);
    for (int c = 0; c < 10; ++c) {
      Vector w(static_cast<Index>(vb.vertices.size()));
      for (Index i = 0; i < w.size(); ++i) w[i] = u(rng);
      w /= w.sum();
      Vector q = Vector::Zero(k);
      for (Index i = 0; i < w.size(); ++i) q += w[i] * vb.vertices[static_cast<std::size_t>(i)];
      EXPECT_LE(r.q_plus.norm(), q.norm() + 1e-9);
    }
  }
}

TEST(PinvProperty, CompleteMarketsAreLeastSquaresAndCollapse) {
  std::mt19937_64 rng(1002);
  for (int t = 0; t < 30; ++t) {
    const PriceSystem ps = testing::random_complete(rng, 2 + t % 3);
    const Derivative d(testing::random_derivative(rng, ps.event_count()));
    const PinvPrice p = pinv_price(ps, d);
    EXPECT_TRUE(p.report.is_least_squares_market);
    EXPECT_TRUE(p.report.is_complete);
    EXPECT_NEAR(p.price, solve(ps, d, Sense::kMax).objective, 1e-8);
    EXPECT_NEAR(p.price, solve(ps, d, Sense::kMin).objective, 1e-8);
  }
}

TEST(PinvProperty, GammaNeverDecreasesWhenColumnsAreAdded) {
  std::mt19937_64 rng(1003);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (int t = 0; t < 50; ++t) {
    // Start from a rank-deficient payoff so gamma has room to grow.
    const Index m = 4;
    Matrix s(m, 1);
    for (Index i = 0; i < m; ++i) s(i, 0) = u(rng);
    Vector pi(m);
    for (Index i = 0; i < m; ++i) pi[i] = u(rng);
    double prev = gamma_kappa(PriceSystem(pi, s)).first;
    for (int extra = 0; extra < 4; ++extra) {
      Matrix grown(m, s.cols() + 1);
      grown.leftCols(s.cols()) = s;
      for (Index i = 0; i < m; ++i) grown(i, s.cols()) = u(rng);
      s = grown;
      const double g = gamma_kappa(PriceSystem(pi, s)).first;
      EXPECT_GE(g, prev - 1e-12);
      EXPECT_LE(g, 1.0);
      prev = g;
    }
  }
}

}  // namespace
}  // namespace martprice
