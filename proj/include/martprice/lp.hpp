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

// Two-phase revised simplex for dense LPs
//
//   min/max  c^T x   s.t.  A_i x (<=, =, >=) b_i,  x >= 0.
//
// The basis inverse is kept explicitly and updated by rank-one pivots; it is
// rebuilt from a fresh LU factorization every `refresh_interval` pivots or
// whenever the basic solution drifts from B x_B = b.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <unordered_set>
#include <vector>

#include "martprice/errors.hpp"
#include "martprice/linalg.hpp"

namespace martprice {

enum class Relation { kLessEqual, kEqual, kGreaterEqual };

struct LinearProgram {
  Matrix constraints;
  Vector rhs;
  std::vector<Relation> relations;
  Vector objective;
  Sense sense = Sense::kMin;

  Index rows() const { return constraints.rows(); }
  Index cols() const { return constraints.cols(); }
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit, kCycled };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::kOptimal: return "optimal";
    case LpStatus::kInfeasible: return "infeasible";
    case LpStatus::kUnbounded: return "unbounded";
    case LpStatus::kIterationLimit: return "iteration-limit";
    case LpStatus::kCycled: return "cycled";
  }
  return "unknown";
}

enum class PivotRule { kBland, kDantzig };

struct SimplexOptions {
  PivotRule rule = PivotRule::kBland;
  std::size_t max_iterations = 200000;
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-9;
  double pivot_tol = 1e-9;
  std::size_t refresh_interval = 50;
  double drift_tol = 1e-10;
};

struct LpResult {
  LpStatus status = LpStatus::kIterationLimit;
  double objective = std::numeric_limits<double>::quiet_NaN();
  Vector x;                  // structural variables
  std::vector<Index> basis;  // basic columns; structural columns are < cols()
  // Optimal: row multipliers with objective == duals . rhs.
  Vector duals;
  // Infeasible: y with y^T A_j <= 0 on every structural column of an
  // equality system and y^T b > 0 (phase-1 dual ray, original row signs).
  Vector farkas;
  double infeasibility = 0.0;  // phase-1 optimum
  std::size_t iterations = 0;
  std::size_t refreshes = 0;
};

namespace detail {

class RevisedSimplex {
 public:
  RevisedSimplex(const LinearProgram& lp, const SimplexOptions& opt) : lp_(lp), opt_(opt) {
    const Index m = lp.rows();
    const Index n = lp.cols();
    if (lp.rhs.size() != m || static_cast<Index>(lp.relations.size()) != m ||
        lp.objective.size() != n) {
      fail(ErrorKind::kInvalidInput, "linear program dimensions are inconsistent");
    }
    n_struct_ = n;
    Index slacks = 0;
    for (Relation r : lp.relations) slacks += r == Relation::kEqual ? 0 : 1;

    sign_ = Vector::Ones(m);
    for (Index i = 0; i < m; ++i) sign_[i] = lp.rhs[i] < 0.0 ? -1.0 : 1.0;

    // Rows whose slack enters with +1 after the sign flip start with that
    // slack basic; the rest get an artificial column.
    std::vector<Index> slack_of(m, -1);
    std::vector<bool> needs_art(m, true);
    Index next = n;
    for (Index i = 0; i < m; ++i) {
      if (lp.relations[i] == Relation::kEqual) continue;
      slack_of[i] = next++;
      const double coef = (lp.relations[i] == Relation::kLessEqual ? 1.0 : -1.0) * sign_[i];
      needs_art[i] = coef < 0.0;
    }
    Index arts = 0;
    for (Index i = 0; i < m; ++i) arts += needs_art[i] ? 1 : 0;
    first_art_ = n + slacks;
    total_ = first_art_ + arts;

    a_ = Matrix::Zero(m, total_);
    b_ = Vector(m);
    basis_.assign(m, -1);
    Index art = first_art_;
    for (Index i = 0; i < m; ++i) {
      a_.row(i).head(n) = sign_[i] * lp.constraints.row(i);
      b_[i] = sign_[i] * lp.rhs[i];
      if (slack_of[i] >= 0) {
        a_(i, slack_of[i]) = (lp.relations[i] == Relation::kLessEqual ? 1.0 : -1.0) * sign_[i];
        if (!needs_art[i]) basis_[i] = slack_of[i];
      }
      if (needs_art[i]) {
        a_(i, art) = 1.0;
        basis_[i] = art++;
      }
    }
    is_basic_.assign(total_, 0);
    for (Index c : basis_) is_basic_[c] = 1;
    // Initial basis is a (signed) identity.
    binv_ = Matrix::Identity(m, m);
    for (Index i = 0; i < m; ++i) binv_(i, i) = 1.0 / a_(i, basis_[i]);
    xb_ = binv_ * b_;
  }

  LpResult run() {
    LpResult res;
    const Index m = lp_.rows();
    if (first_art_ < total_) {
      Vector phase1 = Vector::Zero(total_);
      phase1.tail(total_ - first_art_).setOnes();
      const LpStatus st = iterate(phase1, res, false);
      if (st != LpStatus::kOptimal) {
        res.status = st;
        return finish(res);
      }
      double w = 0.0;
      for (Index i = 0; i < m; ++i) w += is_artificial(basis_[i]) ? xb_[i] : 0.0;
      res.infeasibility = w;
      if (w > opt_.feasibility_tol * std::max(1.0, inf_norm(b_))) {
        res.status = LpStatus::kInfeasible;
        const Vector y = duals_for(phase1);
        res.farkas = sign_.cwiseProduct(y);
        return finish(res);
      }
      drive_out_artificials(res);
    }
    Vector cost = Vector::Zero(total_);
    cost.head(n_struct_) = lp_.sense == Sense::kMax ? Vector(-lp_.objective) : lp_.objective;
    res.status = iterate(cost, res, true);
    if (res.status == LpStatus::kOptimal) {
      Vector y = sign_.cwiseProduct(duals_for(cost));
      res.duals = lp_.sense == Sense::kMax ? Vector(-y) : y;
    }
    return finish(res);
  }

 private:
  bool is_artificial(Index c) const { return c >= first_art_; }

  Vector duals_for(const Vector& cost) const {
    Vector cb(basis_.size());
    for (std::size_t i = 0; i < basis_.size(); ++i) cb[i] = cost[basis_[i]];
    return binv_.transpose() * cb;
  }

  LpResult& finish(LpResult& res) {
    res.x = Vector::Zero(n_struct_);
    for (std::size_t i = 0; i < basis_.size(); ++i) {
      if (basis_[i] < n_struct_) res.x[basis_[i]] = std::max(0.0, xb_[i]);
    }
    res.basis = basis_;
    if (res.status == LpStatus::kOptimal) res.objective = lp_.objective.dot(res.x);
    return res;
  }

  void refresh(LpResult& res) {
    const Index m = lp_.rows();
    Matrix bmat(m, m);
    for (Index i = 0; i < m; ++i) bmat.col(i) = a_.col(basis_[i]);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(bmat);
    binv_ = lu.inverse();
    xb_ = binv_ * b_;
    since_refresh_ = 0;
    ++res.refreshes;
  }

  double drift() const {
    Vector r = -b_;
    for (std::size_t i = 0; i < basis_.size(); ++i) r += a_.col(basis_[i]) * xb_[i];
    return inf_norm(r);
  }

  void pivot(Index row, Index col, const Vector& u) {
    const double piv = u[row];
    is_basic_[basis_[row]] = 0;
    is_basic_[col] = 1;
    basis_[row] = col;
    binv_.row(row) /= piv;
    const Index m = lp_.rows();
    for (Index i = 0; i < m; ++i) {
      if (i != row && u[i] != 0.0) binv_.row(i) -= u[i] * binv_.row(row);
    }
    ++since_refresh_;
  }

  void drive_out_artificials(LpResult& res) {
    const Index m = lp_.rows();
    for (Index r = 0; r < m; ++r) {
      if (!is_artificial(basis_[r])) continue;
      Index best = -1;
      double best_abs = opt_.pivot_tol;
      for (Index j = 0; j < first_art_; ++j) {
        if (is_basic_[j]) continue;
        const double alpha = binv_.row(r).dot(a_.col(j));
        if (std::abs(alpha) > best_abs) {
          best_abs = std::abs(alpha);
          best = j;
        }
      }
      if (best < 0) continue;  // redundant row; its artificial stays basic at zero
      const Vector u = binv_ * a_.col(best);
      pivot(r, best, u);
      xb_ = binv_ * b_;
      ++res.iterations;
    }
  }

  std::uint64_t basis_hash() const {
    std::vector<Index> sorted(basis_);
    std::sort(sorted.begin(), sorted.end());
    std::uint64_t h = 1469598103934665603ULL;
    for (Index c : sorted) h = (h ^ static_cast<std::uint64_t>(c)) * 1099511628211ULL;
    return h;
  }

  LpStatus iterate(const Vector& cost, LpResult& res, bool pin_artificials) {
    const Index m = lp_.rows();
    std::unordered_set<std::uint64_t> degenerate_bases;
    while (true) {
      if (res.iterations >= opt_.max_iterations) return LpStatus::kIterationLimit;
      if (since_refresh_ >= opt_.refresh_interval ||
          drift() > opt_.drift_tol * std::max(1.0, inf_norm(b_))) {
        refresh(res);
      }
      const Vector y = duals_for(cost);
      const Vector reduced = cost.head(first_art_) - a_.leftCols(first_art_).transpose() * y;

      Index enter = -1;
      double best = -opt_.optimality_tol;
      for (Index j = 0; j < first_art_; ++j) {
        if (is_basic_[j] || reduced[j] >= best) continue;
        enter = j;
        if (opt_.rule == PivotRule::kBland) break;
        best = reduced[j];
      }
      if (enter < 0) return LpStatus::kOptimal;

      const Vector u = binv_ * a_.col(enter);
      Index leave = -1;
      double theta = std::numeric_limits<double>::infinity();
      for (Index i = 0; i < m; ++i) {
        double ratio;
        if (pin_artificials && is_artificial(basis_[i])) {
          // Phase 2: artificials left in the basis must stay at zero.
          if (std::abs(u[i]) <= opt_.pivot_tol) continue;
          ratio = 0.0;
        } else {
          if (u[i] <= opt_.pivot_tol) continue;
          ratio = std::max(0.0, xb_[i]) / u[i];
        }
        const bool tie = leave >= 0 && std::abs(ratio - theta) <= 1e-12 * std::max(1.0, theta);
        if (ratio < theta && !tie) {
          theta = ratio;
          leave = i;
        } else if (tie && basis_[i] < basis_[leave]) {
          leave = i;
        }
      }
      if (leave < 0) return LpStatus::kUnbounded;

      if (theta == 0.0) {
        if (!degenerate_bases.insert(basis_hash()).second) return LpStatus::kCycled;
      } else {
        degenerate_bases.clear();
      }

      xb_ -= theta * u;
      xb_[leave] = theta;
      for (Index i = 0; i < m; ++i) {
        if (xb_[i] < 0.0 && xb_[i] > -opt_.feasibility_tol) xb_[i] = 0.0;
      }
      pivot(leave, enter, u);
      ++res.iterations;
    }
  }

  const LinearProgram& lp_;
  SimplexOptions opt_;
  Index n_struct_ = 0;
  Index first_art_ = 0;
  Index total_ = 0;
  Matrix a_;
  Vector b_;
  Vector sign_;
  std::vector<Index> basis_;
  std::vector<char> is_basic_;
  Matrix binv_;
  Vector xb_;
  std::size_t since_refresh_ = 0;
};

}  // namespace detail

inline LpResult solve_lp(const LinearProgram& lp, const SimplexOptions& opt = {}) {
  detail::RevisedSimplex solver(lp, opt);
  return solver.run();
}

}  // namespace martprice
