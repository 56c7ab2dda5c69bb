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
#include <utility>

#include <Eigen/SVD>

#include "martprice/errors.hpp"
#include "martprice/linalg.hpp"
#include "martprice/lp.hpp"
#include "martprice/market.hpp"

namespace martprice {

struct PinvOptions {
  double tol_rank = 1e-12;  // relative to sigma_max
  double tol_pos = 1e-9;
  double tol_residual = 1e-9;  // relative to max(1, ||Pi||_inf)
  bool projection_distance = true;
};

struct PinvReport {
  Vector q_plus;
  bool is_least_squares_market = false;  // S q+ = Pi and q+ > tol_pos
  bool in_closed_set = false;            // S q+ = Pi and q+ >= -tol_pos
  bool is_complete = false;
  double min_entry = 0.0;
  double residual = 0.0;  // ||S q+ - Pi||_2
  double gamma = 0.0;
  double kappa = 0.0;
  Index rank = 0;
  // l1 distance from q+ to {q >= 0, Sq = Pi}; infinite if that set is empty.
  double distance_to_feasible = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

struct ThinSvd {
  Matrix u;  // retained left singular vectors
  Vector sigma;
  Matrix v;
};

inline ThinSvd thin_svd(const Matrix& s, double tol_rank) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(s, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  Index r = 0;
  const double cut = sv.size() > 0 ? tol_rank * sv[0] : 0.0;
  while (r < sv.size() && sv[r] > cut) ++r;
  return {svd.matrixU().leftCols(r), sv.head(r), svd.matrixV().leftCols(r)};
}

inline double gamma_from(const ThinSvd& svd, const Vector& pi) {
  const double n = pi.norm();
  if (n == 0.0) return 0.0;
  const Vector coeffs = svd.u.transpose() * (pi / n);
  return std::min(1.0, coeffs.squaredNorm());
}

inline double kappa_from(const ThinSvd& svd) {
  if (svd.sigma.size() == 0) return std::numeric_limits<double>::infinity();
  return svd.sigma[0] / svd.sigma[svd.sigma.size() - 1];
}

}  // namespace detail

// min sum |q - q+| over q >= 0, Sq = Pi, as an LP in (q, t).
inline double projection_distance(const PriceSystem& ps, const Vector& q_plus) {
  const Index m = ps.asset_count();
  const Index k = ps.event_count();
  LinearProgram lp;
  lp.constraints = Matrix::Zero(2 * k + m, 2 * k);
  lp.rhs.resize(2 * k + m);
  for (Index j = 0; j < k; ++j) {
    lp.constraints(j, j) = 1.0;
    lp.constraints(j, k + j) = -1.0;
    lp.rhs[j] = q_plus[j];
    lp.constraints(k + j, j) = -1.0;
    lp.constraints(k + j, k + j) = -1.0;
    lp.rhs[k + j] = -q_plus[j];
  }
  lp.constraints.block(2 * k, 0, m, k) = ps.payoffs();
  lp.rhs.tail(m) = ps.prices();
  lp.relations.assign(static_cast<std::size_t>(2 * k), Relation::kLessEqual);
  lp.relations.resize(static_cast<std::size_t>(2 * k + m), Relation::kEqual);
  lp.objective = Vector::Zero(2 * k);
  lp.objective.tail(k).setOnes();
  lp.sense = Sense::kMin;
  const LpResult r = solve_lp(lp);
  if (r.status == LpStatus::kInfeasible) return std::numeric_limits<double>::infinity();
  if (r.status != LpStatus::kOptimal) return std::numeric_limits<double>::quiet_NaN();
  return r.objective;
}

inline PinvReport pinv_solve(const PriceSystem& ps, const PinvOptions& opt = {}) {
  const detail::ThinSvd svd = detail::thin_svd(ps.payoffs(), opt.tol_rank);
  PinvReport rep;
  rep.rank = svd.sigma.size();
  const Vector coeffs = svd.u.transpose() * ps.prices();
  rep.q_plus = svd.v * (coeffs.array() / svd.sigma.array()).matrix();
  rep.residual = (ps.payoffs() * rep.q_plus - ps.prices()).norm();
  rep.min_entry = rep.q_plus.minCoeff();
  rep.gamma = detail::gamma_from(svd, ps.prices());
  rep.kappa = detail::kappa_from(svd);
  const double res_tol = opt.tol_residual * std::max(1.0, inf_norm(ps.prices()));
  const bool solves = rep.residual <= res_tol;
  rep.is_least_squares_market = solves && rep.min_entry > opt.tol_pos;
  rep.in_closed_set = solves && rep.min_entry >= -opt.tol_pos;
  rep.is_complete = ps.asset_count() == ps.event_count() && rep.rank == ps.event_count();
  if (opt.projection_distance) rep.distance_to_feasible = projection_distance(ps, rep.q_plus);
  return rep;
}

struct PinvPrice {
  double price = 0.0;
  PinvReport report;
};

class NotLeastSquaresError : public PricingError {
 public:
  explicit NotLeastSquaresError(PinvReport report)
      : PricingError(ErrorKind::kNotLeastSquares,
                     "market is not least-squares: min entry of S+Pi is " +
                         std::to_string(report.min_entry) + ", residual " +
                         std::to_string(report.residual)),
        report_(std::move(report)) {}
  const PinvReport& report() const { return report_; }

 private:
  PinvReport report_;
};

inline PinvPrice pinv_price(const PriceSystem& ps, const Derivative& d, const PinvOptions& opt = {}) {
  if (d.size() != ps.event_count()) {
    fail(ErrorKind::kInvalidInput, "derivative length does not match event count");
  }
  PinvReport rep = pinv_solve(ps, opt);
  if (!rep.is_least_squares_market) throw NotLeastSquaresError(std::move(rep));
  const double price = d.payoffs().dot(rep.q_plus);
  return {price, std::move(rep)};
}

inline std::pair<double, double> gamma_kappa(const PriceSystem& ps, double tol_rank = 1e-12) {
  const detail::ThinSvd svd = detail::thin_svd(ps.payoffs(), tol_rank);
  return {detail::gamma_from(svd, ps.prices()), detail::kappa_from(svd)};
}

}  // namespace martprice
