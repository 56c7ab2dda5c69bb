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

#include <algorithm>
#include <string>
#include <variant>

#include "martprice/errors.hpp"
#include "martprice/lp.hpp"
#include "martprice/market.hpp"

namespace martprice {

using ArbitrageVerdict = std::variant<MartingaleMeasure, ArbitrageCertificate>;

inline bool has_arbitrage(const ArbitrageVerdict& v) {
  return std::holds_alternative<ArbitrageCertificate>(v);
}

// Phase-1 feasibility of {q >= 0, Sq = Pi}. A feasible basis yields a
// measure; otherwise the phase-1 dual ray y (S^T y <= 0, y.Pi > 0) becomes the
// portfolio v = -y, shifted along the safe asset so that every future value is
// strictly positive, scaled to max future value 1 and re-verified.
inline ArbitrageVerdict detect_arbitrage(const PriceSystem& ps, double tol = 1e-7,
                                         const SimplexOptions& opt = {}) {
  require_valid(ps);
  LinearProgram lp;
  lp.constraints = ps.payoffs();
  lp.rhs = ps.prices();
  lp.relations.assign(static_cast<std::size_t>(ps.asset_count()), Relation::kEqual);
  lp.objective = Vector::Zero(ps.event_count());
  SimplexOptions phase1 = opt;
  phase1.feasibility_tol = tol / std::max(1.0, inf_norm(ps.prices()));
  const LpResult r = solve_lp(lp, phase1);

  if (r.status == LpStatus::kOptimal) {
    MartingaleMeasure m = MartingaleMeasure::evaluate(ps, r.x);
    if (m.residual_inf <= tol) return m;
    fail(ErrorKind::kSolver, "phase-1 measure residual " + std::to_string(m.residual_inf) +
                                 " exceeds tolerance");
  }
  if (r.status != LpStatus::kInfeasible) {
    fail(r.status == LpStatus::kIterationLimit ? ErrorKind::kIterationLimit : ErrorKind::kSolver,
         std::string("phase-1 feasibility LP ended with status ") + to_string(r.status));
  }

  Vector v = -r.farkas;
  const double pv = v.dot(ps.prices());
  // The safe asset pays 1 everywhere and costs 1.
  v[0] += -pv / 2.0;
  Vector fv = ps.payoffs().transpose() * v;
  const double scale = fv.maxCoeff();
  if (!(scale > 0.0)) fail(ErrorKind::kSolver, "degenerate arbitrage direction");
  v /= scale;

  ArbitrageCertificate cert;
  cert.portfolio = v;
  cert.present_value = v.dot(ps.prices());
  cert.future_values = ps.payoffs().transpose() * v;
  if (!cert.verify(ps, tol)) {
    fail(ErrorKind::kSolver, "arbitrage certificate failed verification");
  }
  return cert;
}

}  // namespace martprice
