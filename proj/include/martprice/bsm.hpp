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

// Discretized single-asset Black-Scholes-Merton market: B(w) = 6w/K0 on
// w = -K0..K0 with Gaussian reference weights, plus the Radon-Nikodym LP
// over x = dQ/dP and analytic reference prices.

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "martprice/errors.hpp"
#include "martprice/linalg.hpp"
#include "martprice/lp.hpp"
#include "martprice/market.hpp"

namespace martprice {

enum class HalfSigmaSign { kMinus, kPlus };
enum class OptionKind { kCall, kPut };

inline const char* to_string(OptionKind k) { return k == OptionKind::kCall ? "call" : "put"; }

struct BsmSpec {
  double pi = 10.0;
  double mu = 1.0;
  double sigma = 1.0;
  int k0 = 50;
  HalfSigmaSign convention = HalfSigmaSign::kMinus;

  void validate() const {
    if (!(std::isfinite(pi) && pi > 0.0)) fail(ErrorKind::kInvalidInput, "bsm spot must be positive");
    if (!(std::isfinite(sigma) && sigma > 0.0)) fail(ErrorKind::kInvalidInput, "bsm sigma must be positive");
    if (!std::isfinite(mu)) fail(ErrorKind::kInvalidInput, "bsm mu must be finite");
    if (k0 < 1) fail(ErrorKind::kInvalidInput, "bsm k0 must be at least 1");
  }
};

struct DiscretizedBsm {
  BsmSpec spec;
  Vector grid_b;  // B(w), w = -K0..K0
  Vector p;       // reference probabilities
  PriceSystem price_system;
  double theta = 0.0;  // mu / sigma

  Vector stock;        // S_2(w), row 1 of the payoff matrix

  Index events() const { return grid_b.size(); }
};

inline double option_payoff(OptionKind kind, double s, double strike) {
  return kind == OptionKind::kCall ? std::max(0.0, s - strike) : std::max(0.0, strike - s);
}

inline DiscretizedBsm build(const BsmSpec& spec) {
  spec.validate();
  const double half = 0.5 * spec.sigma * spec.sigma;
  const double drift = spec.mu + (spec.convention == HalfSigmaSign::kMinus ? -half : half);
  const double worst = 6.0 * spec.sigma + std::abs(drift) + std::abs(std::log(spec.pi));
  if (worst >= std::log(std::numeric_limits<double>::max()) - 1.0) {
    fail(ErrorKind::kInvalidInput, "bsm parameters overflow the exponential range");
  }
  const Index k = 2 * static_cast<Index>(spec.k0) + 1;
  Vector b(k), p(k), s2(k);
  for (Index i = 0; i < k; ++i) {
    const double w = static_cast<double>(i - spec.k0);
    b[i] = 6.0 * w / spec.k0;
    p[i] = std::exp(-0.5 * b[i] * b[i]);
    s2[i] = spec.pi * std::exp(spec.sigma * b[i] + drift);
  }
  p /= p.sum();
  Matrix s(2, k);
  s.row(0).setOnes();
  s.row(1) = s2.transpose();
  Vector prices(2);
  prices << 1.0, spec.pi;
  DiscretizedBsm m{spec, std::move(b), std::move(p), PriceSystem(std::move(prices), std::move(s),
                                                                 {"bond", "stock"}),
                   spec.mu / spec.sigma, std::move(s2)};
  return m;
}

inline Derivative option_derivative(const DiscretizedBsm& m, OptionKind kind, double strike) {
  if (!(strike >= 0.0)) fail(ErrorKind::kInvalidInput, "strike must be non-negative");
  Vector d(m.events());
  for (Index i = 0; i < d.size(); ++i) d[i] = option_payoff(kind, m.stock[i], strike);
  return Derivative(std::move(d));
}

inline Derivative call_payoff(const DiscretizedBsm& m, double strike) {
  return option_derivative(m, OptionKind::kCall, strike);
}

inline Derivative put_payoff(const DiscretizedBsm& m, double strike) {
  return option_derivative(m, OptionKind::kPut, strike);
}

// Gaussian measure change x(w) = exp(-theta B(w) - theta^2 / 2).
inline Vector girsanov_rn(const DiscretizedBsm& m, double theta) {
  return (-theta * m.grid_b.array() - 0.5 * theta * theta).exp().matrix();
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

struct AnalyticPrice {
  // Sum over the grid of p(w) D(Pi exp(sigma B(w) - sigma^2/2)): the
  // risk-neutral expectation evaluated directly on the reference grid, so it
  // does not depend on the drift.
  double discrete = 0.0;
  // Sum over the grid of q(w) D(w), q proportional to p x(mu/sigma), using
  // the market's own stock grid. Equal to `discrete` only when mu = 0.
  double reweighted = 0.0;
  // Zero-rate Black-Scholes value.
  double closed_form = 0.0;
};

inline double black_scholes(OptionKind kind, double spot, double strike, double sigma) {
  if (strike == 0.0) return kind == OptionKind::kCall ? spot : 0.0;
  const double d1 = (std::log(spot / strike) + 0.5 * sigma * sigma) / sigma;
  const double d2 = d1 - sigma;
  if (kind == OptionKind::kCall) return spot * normal_cdf(d1) - strike * normal_cdf(d2);
  return strike * normal_cdf(-d2) - spot * normal_cdf(-d1);
}

inline AnalyticPrice analytic_price(const DiscretizedBsm& m, OptionKind kind, double strike) {
  if (!(strike >= 0.0)) fail(ErrorKind::kInvalidInput, "strike must be non-negative");
  const BsmSpec& sp = m.spec;
  AnalyticPrice out;
  const double half = 0.5 * sp.sigma * sp.sigma;
  for (Index i = 0; i < m.events(); ++i) {
    out.discrete += m.p[i] * option_payoff(kind, sp.pi * std::exp(sp.sigma * m.grid_b[i] - half), strike);
  }
  Vector q = m.p.cwiseProduct(girsanov_rn(m, m.theta));
  q /= q.sum();
  for (Index i = 0; i < m.events(); ++i) out.reweighted += q[i] * option_payoff(kind, m.stock[i], strike);
  out.closed_form = black_scholes(kind, sp.pi, strike, sp.sigma);
  return out;
}

// max/min (p o D)^T x  s.t.  (p o S_j)^T x = Pi_j, x >= 0, and optionally
// |x(w) - x(w+1)| <= eta x(w) for consecutive grid points.
inline LinearProgram build_rn_lp(const DiscretizedBsm& m, const Derivative& d,
                                 std::optional<double> eta, Sense sense = Sense::kMax) {
  if (eta && !(*eta > 0.0)) fail(ErrorKind::kInvalidInput, "eta must be positive");
  if (d.size() != m.events()) fail(ErrorKind::kInvalidInput, "derivative does not match bsm grid");
  const Index k = m.events();
  const Index pairs = eta ? k - 1 : 0;
  LinearProgram lp;
  lp.constraints = Matrix::Zero(2 + 2 * pairs, k);
  lp.rhs = Vector::Zero(2 + 2 * pairs);
  for (Index j = 0; j < 2; ++j) {
    lp.constraints.row(j) = m.price_system.payoffs().row(j).cwiseProduct(m.p.transpose());
    lp.rhs[j] = m.price_system.prices()[j];
  }
  lp.relations.assign(2, Relation::kEqual);
  for (Index w = 0; w < pairs; ++w) {
    const Index r = 2 + 2 * w;
    lp.constraints(r, w) = 1.0 - *eta;
    lp.constraints(r, w + 1) = -1.0;
    lp.constraints(r + 1, w) = -1.0 - *eta;
    lp.constraints(r + 1, w + 1) = 1.0;
  }
  lp.relations.resize(static_cast<std::size_t>(lp.rhs.size()), Relation::kLessEqual);
  lp.objective = m.p.cwiseProduct(d.payoffs());
  lp.sense = sense;
  return lp;
}

struct BoundResult {
  LpStatus status = LpStatus::kInfeasible;
  double value = std::numeric_limits<double>::quiet_NaN();
  Vector x;  // Radon-Nikodym derivative on the grid
  Vector q;  // p o x
};

struct RnInterval {
  BoundResult min;
  BoundResult max;
  bool optimal() const { return min.status == LpStatus::kOptimal && max.status == LpStatus::kOptimal; }
  double width() const { return max.value - min.value; }
};

inline BoundResult solve_rn_bound(const DiscretizedBsm& m, const Derivative& d,
                                  std::optional<double> eta, Sense sense,
                                  const SimplexOptions& opt = {}) {
  const LpResult r = solve_lp(build_rn_lp(m, d, eta, sense), opt);
  BoundResult out;
  out.status = r.status;
  if (r.status == LpStatus::kOptimal) {
    out.value = r.objective;
    out.x = r.x;
    out.q = m.p.cwiseProduct(r.x);
  }
  return out;
}

inline RnInterval rn_interval(const DiscretizedBsm& m, const Derivative& d,
                              std::optional<double> eta, const SimplexOptions& opt = {}) {
  return {solve_rn_bound(m, d, eta, Sense::kMin, opt), solve_rn_bound(m, d, eta, Sense::kMax, opt)};
}

// One option under one BSM setting: analytic values, the unregularized LP
// interval, and the payoff-to-price ratio rho = D_max / upper price that
// drives the relative-error cost of the game solver.
struct ScenarioReport {
  BsmSpec spec;
  OptionKind kind = OptionKind::kCall;
  double strike = 0.0;
  AnalyticPrice analytic;
  RnInterval interval;
  double d_max = 0.0;
  double rho = std::numeric_limits<double>::quiet_NaN();
  double rho_analytic = std::numeric_limits<double>::quiet_NaN();  // D_max / discrete analytic
};

inline ScenarioReport scenario_report(const BsmSpec& spec, OptionKind kind, double strike) {
  ScenarioReport rep;
  rep.spec = spec;
  rep.kind = kind;
  rep.strike = strike;
  const DiscretizedBsm m = build(spec);
  const Derivative d = option_derivative(m, kind, strike);
  rep.analytic = analytic_price(m, kind, strike);
  rep.interval = rn_interval(m, d, std::nullopt);
  rep.d_max = d.d_max();
  if (rep.interval.max.status == LpStatus::kOptimal && rep.interval.max.value > 0.0) {
    rep.rho = rep.d_max / rep.interval.max.value;
  }
  if (rep.analytic.discrete > 0.0) rep.rho_analytic = rep.d_max / rep.analytic.discrete;
  return rep;
}

}  // namespace martprice
