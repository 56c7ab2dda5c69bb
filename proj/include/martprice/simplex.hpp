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

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "martprice/errors.hpp"
#include "martprice/linalg.hpp"
#include "martprice/lp.hpp"
#include "martprice/market.hpp"

namespace martprice {

struct SimplexSolution {
  LpStatus status = LpStatus::kIterationLimit;
  Sense sense = Sense::kMax;
  double objective = std::numeric_limits<double>::quiet_NaN();
  std::vector<Index> basis;  // basic event indices, at most N+1
  Vector q;                  // full measure, zero off the basis
  double kappa_basis = std::numeric_limits<double>::quiet_NaN();
  std::size_t iterations = 0;

  bool optimal() const { return status == LpStatus::kOptimal; }
};

inline LinearProgram pricing_program(const PriceSystem& ps, const Derivative& d, Sense sense) {
  if (d.size() != ps.event_count()) {
    fail(ErrorKind::kInvalidInput, "derivative length does not match event count");
  }
  LinearProgram lp;
  lp.constraints = ps.payoffs();
  lp.rhs = ps.prices();
  lp.relations.assign(static_cast<std::size_t>(ps.asset_count()), Relation::kEqual);
  lp.objective = d.payoffs();
  lp.sense = sense;
  return lp;
}

// sigma_max / sigma_min of the selected payoff columns.
inline double basis_condition(const PriceSystem& ps, const std::vector<Index>& basis) {
  if (basis.empty()) return std::numeric_limits<double>::infinity();
  Eigen::MatrixXd sb(ps.asset_count(), static_cast<Index>(basis.size()));
  for (std::size_t k = 0; k < basis.size(); ++k) sb.col(static_cast<Index>(k)) = ps.payoffs().col(basis[k]);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(sb);
  const auto& sv = svd.singularValues();
  const double lo = sv[sv.size() - 1];
  if (sb.cols() < sb.rows() || lo <= 0.0) return std::numeric_limits<double>::infinity();
  return sv[0] / lo;
}

// Optimizes E_q[D] over {q >= 0, Sq = Pi}. Infeasible and cycled outcomes are
// reported in the status; unbounded and iteration-limit outcomes throw.
inline SimplexSolution solve(const PriceSystem& ps, const Derivative& d, Sense sense,
                             const SimplexOptions& opt = {}) {
  require_valid(ps);
  if (ps.event_count() < ps.asset_count()) {
    fail(ErrorKind::kInvalidInput, "simplex pricing needs K >= N+1 events");
  }
  const LpResult r = solve_lp(pricing_program(ps, d, sense), opt);
  SimplexSolution sol;
  sol.status = r.status;
  sol.sense = sense;
  sol.iterations = r.iterations;
  if (r.status == LpStatus::kUnbounded) {
    fail(ErrorKind::kSolver, "pricing LP reported unbounded; feasible set lies in the simplex");
  }
  if (r.status == LpStatus::kIterationLimit) {
    fail(ErrorKind::kIterationLimit, "simplex iteration limit reached");
  }
  if (r.status != LpStatus::kOptimal) return sol;
  sol.objective = r.objective;
  sol.q = r.x;
  for (Index c : r.basis) {
    if (c < ps.event_count()) sol.basis.push_back(c);
  }
  std::sort(sol.basis.begin(), sol.basis.end());
  sol.kappa_basis = basis_condition(ps, sol.basis);
  return sol;
}

// Recomputes q_B from S_B q_B = Pi with a fresh factorization instead of
// trusting the simplex iterate.
inline MartingaleMeasure extract_measure(const SimplexSolution& sol, const PriceSystem& ps) {
  if (!sol.optimal()) fail(ErrorKind::kInvalidInput, "measure extraction needs an optimal basis");
  const Index m = ps.asset_count();
  const Index nb = static_cast<Index>(sol.basis.size());
  Eigen::MatrixXd sb(m, nb);
  for (Index k = 0; k < nb; ++k) sb.col(k) = ps.payoffs().col(sol.basis[static_cast<std::size_t>(k)]);
  if (sol.kappa_basis * std::numeric_limits<double>::epsilon() > 1.0 && nb == m) {
    fail(ErrorKind::kSingularBasis,
         "basis condition number " + std::to_string(sol.kappa_basis) + " exceeds 1/eps");
  }
  Eigen::VectorXd qb;
  if (nb == m) {
    qb = sb.partialPivLu().solve(ps.prices());
  } else {
    // Rank-deficient payoffs leave fewer structural columns than rows.
    qb = sb.colPivHouseholderQr().solve(ps.prices());
  }
  Vector q = Vector::Zero(ps.event_count());
  for (Index k = 0; k < nb; ++k) q[sol.basis[static_cast<std::size_t>(k)]] = qb[k];
  return MartingaleMeasure::evaluate(ps, std::move(q));
}

struct CrossoverDecision {
  enum class Preferred { kZsg, kSimplex } preferred;
  double lhs;  // sqrt(NK) / (sqrt(N) + sqrt(K))
  double rhs;  // (eps_smpx / (kappa T)) ((r+1) Pi_D / eps_zsg)^3
};

inline const char* to_string(CrossoverDecision::Preferred p) {
  return p == CrossoverDecision::Preferred::kZsg ? "zsg" : "simplex";
}

// Heuristic for when the simplex route should beat the game route.
inline CrossoverDecision crossover_heuristic(double n, double k, double kappa_basis,
                                             double simplex_iterations, double eps_simplex,
                                             double eps_zsg, double r, double price_normalized) {
  if (!(n > 0 && k > 0 && kappa_basis > 0 && simplex_iterations > 0 && eps_simplex > 0 &&
        eps_zsg > 0 && r > 0 && price_normalized > 0)) {
    fail(ErrorKind::kInvalidInput, "crossover heuristic needs positive inputs");
  }
  CrossoverDecision out{};
  out.lhs = std::sqrt(n * k) / (std::sqrt(n) + std::sqrt(k));
  out.rhs = (eps_simplex / (kappa_basis * simplex_iterations)) *
            std::pow((r + 1.0) * price_normalized / eps_zsg, 3);
  out.preferred = out.lhs <= out.rhs ? CrossoverDecision::Preferred::kSimplex
                                     : CrossoverDecision::Preferred::kZsg;
  return out;
}

}  // namespace martprice
