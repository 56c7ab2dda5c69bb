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

#pragma once

// Normalized standard form of the pricing LP, its dual, and the zero-sum game
// that decides whether the normalized optimum clears a level alpha.

#include <algorithm>
#include <optional>
#include <string>

#include "martprice/errors.hpp"
#include "martprice/linalg.hpp"
#include "martprice/lp.hpp"
#include "martprice/market.hpp"

namespace martprice {

// min objective^T q  s.t.  A q <= c, q >= 0, with A = [S'; -S'], c = [Pi'; -Pi'],
// S' = S / s_max, Pi' = Pi / s_max. The objective is -D/d_max for the upper
// price bound and +D/d_max for the lower one, so the normalized price lies in
// [0, 1] either way.
struct StandardFormLP {
  Matrix a;
  Vector c;
  Vector objective;
  double s_max = 1.0;
  double d_max = 0.0;
  Sense sense = Sense::kMax;
  bool zero_payoff = false;  // D == 0, the price is 0 without solving

  Index events() const { return a.cols(); }
  Index assets() const { return a.rows() / 2; }

  LinearProgram program() const {
    LinearProgram lp;
    lp.constraints = a;
    lp.rhs = c;
    lp.relations.assign(static_cast<std::size_t>(a.rows()), Relation::kLessEqual);
    lp.objective = objective;
    lp.sense = Sense::kMin;
    return lp;
  }

  // Normalized price in [0, 1] from the min-form optimum.
  double normalized_price(double opt) const { return sense == Sense::kMax ? -opt : opt; }
  double price(double opt) const { return normalized_price(opt) * d_max; }
};

inline StandardFormLP to_standard_form(const PriceSystem& ps, const Derivative& d, Sense sense) {
  require_valid(ps);
  if (d.size() != ps.event_count()) {
    fail(ErrorKind::kInvalidInput, "derivative length does not match event count");
  }
  StandardFormLP lp;
  lp.sense = sense;
  lp.s_max = ps.s_max();
  lp.d_max = d.d_max();
  if (!(lp.s_max > 0.0)) fail(ErrorKind::kInvalidInput, "payoff matrix maximum must be positive");
  const Index m = ps.asset_count();
  const Index k = ps.event_count();
  lp.a.resize(2 * m, k);
  lp.a.topRows(m) = ps.payoffs() / lp.s_max;
  lp.a.bottomRows(m) = -ps.payoffs() / lp.s_max;
  lp.c.resize(2 * m);
  lp.c.head(m) = ps.prices() / lp.s_max;
  lp.c.tail(m) = -ps.prices() / lp.s_max;
  if (lp.d_max == 0.0) {
    lp.zero_payoff = true;
    lp.objective = Vector::Zero(k);
  } else {
    const Vector dn = d.payoffs() / lp.d_max;
    lp.objective = sense == Sense::kMax ? Vector(-dn) : dn;
  }
  return lp;
}

// Lagrange dual of the standard form:  max -c^T xi  s.t.  A^T xi >= -objective,
// xi >= 0. For the upper bound this is the cheapest superhedge. Its optimum
// equals the primal min-form optimum.
struct DualLP {
  Matrix constraints;  // A^T
  Vector lower;        // -objective
  Vector weights;      // c

  LinearProgram program() const {
    LinearProgram lp;
    lp.constraints = constraints;
    lp.rhs = lower;
    lp.relations.assign(static_cast<std::size_t>(constraints.rows()), Relation::kGreaterEqual);
    lp.objective = -weights;
    lp.sense = Sense::kMax;
    return lp;
  }

  double value(const Vector& xi) const { return -weights.dot(xi); }
  bool feasible(const Vector& xi, double tol) const {
    return xi.minCoeff() >= -tol && (constraints * xi - lower).minCoeff() >= -tol;
  }
};

inline DualLP build_dual(const StandardFormLP& lp) {
  return DualLP{lp.a.transpose(), -lp.objective, lp.c};
}

// Game matrix F in [-1,1]^{(2N+5) x (K+2)}; rows, top to bottom:
//   [ 1^T,      1, -1      ]
//   [-1^T,      1,  1      ]
//   [ obj^T,    0, level/R ]
//   [ S',       0, -Pi'/R  ]
//   [-S',       0,  Pi'/R  ]
// with obj = -D/d_max and level = alpha for the upper bound, obj = D/d_max and
// level = -alpha for the lower bound. Value <= 0 iff the bound clears alpha.
struct GameEmbedding {
  Matrix f;
  double alpha = 0.0;
  double big_r = 1.0;  // l1 bound on the primal solution; q is a probability vector
  double r = 1.0;      // l1 bound on the dual solution
  Sense sense = Sense::kMax;
  Index events = 0;
  Index assets = 0;

  Index rows() const { return f.rows(); }
  Index cols() const { return f.cols(); }

  static constexpr Index kObjectiveRow = 2;
  static constexpr Index kPriceRowsBegin = 3;
  Index slack_col() const { return events; }
  Index level_col() const { return events + 1; }

  // Only the objective row's last entry depends on alpha.
  GameEmbedding with_alpha(double new_alpha) const {
    GameEmbedding g = *this;
    g.alpha = new_alpha;
    g.f(kObjectiveRow, level_col()) = level_entry(new_alpha);
    return g;
  }

  double level_entry(double a) const { return (sense == Sense::kMax ? a : -a) / big_r; }
};

inline GameEmbedding build_game(const StandardFormLP& lp, double alpha, double r) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) fail(ErrorKind::kInvalidInput, "alpha must lie in [0, 1]");
  if (!(r > 0.0)) fail(ErrorKind::kInvalidInput, "r must be positive");
  GameEmbedding g;
  g.alpha = alpha;
  g.r = r;
  g.sense = lp.sense;
  g.events = lp.events();
  g.assets = lp.assets();
  const Index k = g.events;
  const Index m = g.assets;
  g.f = Matrix::Zero(2 * m + 3, k + 2);
  g.f.row(0).head(k).setOnes();
  g.f(0, k) = 1.0;
  g.f(0, k + 1) = -1.0;
  g.f.row(1).head(k).setConstant(-1.0);
  g.f(1, k) = 1.0;
  g.f(1, k + 1) = 1.0;
  g.f.row(GameEmbedding::kObjectiveRow).head(k) = lp.objective.transpose();
  g.f(GameEmbedding::kObjectiveRow, k + 1) = g.level_entry(alpha);
  g.f.block(3, 0, 2 * m, k) = lp.a;
  g.f.block(3, k + 1, 2 * m, 1) = -lp.c / g.big_r;
  if (g.f.cwiseAbs().maxCoeff() > 1.0 + 1e-15) {
    fail(ErrorKind::kInvalidInput, "game matrix entry outside [-1, 1]; check normalization");
  }
  return g;
}

struct REstimate {
  double r = 1.0;
  double l1_norm = 0.0;
  bool fallback = false;
  std::string note;
  Vector xi;
};

// r = max(||xi*||_1, 1) from the dual optimum.
inline REstimate estimate_r(const StandardFormLP& lp, std::optional<double> fallback = std::nullopt,
                            const SimplexOptions& opt = {}) {
  REstimate out;
  if (lp.zero_payoff) {
    out.xi = Vector::Zero(lp.a.rows());
    out.note = "zero payoff";
    return out;
  }
  const LpResult res = solve_lp(build_dual(lp).program(), opt);
  if (res.status == LpStatus::kUnbounded) {
    fail(ErrorKind::kInfeasible, "dual pricing LP is unbounded: the market admits arbitrage");
  }
  if (res.status != LpStatus::kOptimal) {
    out.fallback = true;
    out.r = fallback.value_or(static_cast<double>(lp.assets()));
    out.note = std::string("dual solve ended with status ") + to_string(res.status);
    return out;
  }
  out.xi = res.x;
  out.l1_norm = res.x.lpNorm<1>();
  out.r = std::max(out.l1_norm, 1.0);
  return out;
}

inline REstimate estimate_r(const PriceSystem& ps, const Derivative& d, Sense sense,
                            std::optional<double> fallback = std::nullopt) {
  return estimate_r(to_standard_form(ps, d, sense), fallback);
}

}  // namespace martprice
