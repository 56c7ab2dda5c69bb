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
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "martprice/errors.hpp"
#include "martprice/linalg.hpp"

namespace martprice {

// Current prices and the (N+1) x K payoff matrix of a single-period market.
// Row 0 is the safe asset. Construction only checks shapes; use
// validate_price_system() for the economic invariants.
class PriceSystem {
 public:
  PriceSystem(Vector prices, Matrix payoffs, std::vector<std::string> labels = {})
      : prices_(std::move(prices)), payoffs_(std::move(payoffs)), labels_(std::move(labels)) {
    if (payoffs_.rows() == 0 || payoffs_.cols() == 0) {
      fail(ErrorKind::kInvalidInput, "payoff matrix must be non-empty");
    }
    if (prices_.size() != payoffs_.rows()) {
      fail(ErrorKind::kInvalidInput, "price vector length " + std::to_string(prices_.size()) +
                                         " does not match payoff rows " +
                                         std::to_string(payoffs_.rows()));
    }
    if (!labels_.empty() && static_cast<Index>(labels_.size()) != payoffs_.rows()) {
      fail(ErrorKind::kInvalidInput, "asset label count does not match payoff rows");
    }
  }

  const Vector& prices() const { return prices_; }
  const Matrix& payoffs() const { return payoffs_; }
  const std::vector<std::string>& labels() const { return labels_; }

  Index asset_count() const { return payoffs_.rows(); }  // N+1
  Index risky_count() const { return payoffs_.rows() - 1; }  // N
  Index event_count() const { return payoffs_.cols(); }  // K

  double s_max() const { return payoffs_.maxCoeff(); }

 private:
  Vector prices_;
  Matrix payoffs_;
  std::vector<std::string> labels_;
};

// Non-negative payoff over the K events.
class Derivative {
 public:
  explicit Derivative(Vector payoffs) : payoffs_(std::move(payoffs)) {
    if (payoffs_.size() == 0) fail(ErrorKind::kInvalidInput, "derivative payoff is empty");
    for (Index i = 0; i < payoffs_.size(); ++i) {
      if (!std::isfinite(payoffs_[i]) || payoffs_[i] < 0.0) {
        fail(ErrorKind::kInvalidInput,
             "derivative payoff must be finite and non-negative at event " + std::to_string(i));
      }
    }
    d_max_ = payoffs_.maxCoeff();
  }

  const Vector& payoffs() const { return payoffs_; }
  double d_max() const { return d_max_; }
  Index size() const { return payoffs_.size(); }

 private:
  Vector payoffs_;
  double d_max_ = 0.0;
};

// Probability vector on the closed set {q >= 0, Sq = Pi}; residual and the
// smallest weight are recorded rather than assumed.
struct MartingaleMeasure {
  Vector weights;
  double residual_inf = 0.0;
  double min_weight = 0.0;

  double sum() const { return weights.sum(); }
  // Strict positivity, i.e. equivalence to the reference measure.
  bool equivalent(double tol = 0.0) const { return min_weight > tol; }

  static MartingaleMeasure evaluate(const PriceSystem& ps, Vector weights) {
    if (weights.size() != ps.event_count()) {
      fail(ErrorKind::kInvalidInput, "measure length does not match event count");
    }
    MartingaleMeasure m;
    m.residual_inf = inf_norm(ps.payoffs() * weights - ps.prices());
    m.min_weight = weights.minCoeff();
    m.weights = std::move(weights);
    return m;
  }
};

struct ArbitrageCertificate {
  Vector portfolio;
  double present_value = 0.0;
  Vector future_values;

  // Re-checks the certificate by direct multiplication.
  bool verify(const PriceSystem& ps, double tol) const {
    if (portfolio.size() != ps.asset_count()) return false;
    const double pv = portfolio.dot(ps.prices());
    const Vector fv = ps.payoffs().transpose() * portfolio;
    return pv <= 0.0 && fv.minCoeff() >= 0.0 && fv.maxCoeff() > tol;
  }
};

struct Violation {
  std::string message;
  std::optional<Index> row;
  std::optional<Index> col;
};

inline std::vector<Violation> validate_price_system(const PriceSystem& ps) {
  std::vector<Violation> out;
  const Vector& p = ps.prices();
  const Matrix& s = ps.payoffs();
  for (Index i = 0; i < p.size(); ++i) {
    if (!std::isfinite(p[i])) {
      out.push_back({"non-finite price at index " + std::to_string(i), i, std::nullopt});
    } else if (p[i] < 0.0) {
      out.push_back({"negative price at index " + std::to_string(i), i, std::nullopt});
    }
  }
  if (std::isfinite(p[0]) && p[0] != 1.0) {
    out.push_back({"safe asset price must be exactly 1", 0, std::nullopt});
  }
  bool safe_row_ok = true;
  for (Index j = 0; j < s.cols(); ++j) safe_row_ok = safe_row_ok && s(0, j) == 1.0;
  if (!safe_row_ok) out.push_back({"safe asset row not all ones", 0, std::nullopt});
  for (Index i = 0; i < s.rows(); ++i) {
    for (Index j = 0; j < s.cols(); ++j) {
      if (!std::isfinite(s(i, j))) {
        out.push_back({"non-finite payoff at (" + std::to_string(i) + ", " + std::to_string(j) + ")",
                       i, j});
      } else if (s(i, j) < 0.0) {
        out.push_back({"negative payoff at (" + std::to_string(i) + ", " + std::to_string(j) + ")",
                       i, j});
      }
    }
  }
  return out;
}

inline void require_valid(const PriceSystem& ps) {
  const auto violations = validate_price_system(ps);
  if (!violations.empty()) {
    std::string msg = "invalid price system: " + violations.front().message;
    if (violations.size() > 1) msg += " (+" + std::to_string(violations.size() - 1) + " more)";
    fail(ErrorKind::kInvalidInput, msg);
  }
}

// Singular values above rel_tol * sigma_max.
inline Index numerical_rank(const Matrix& m, double rel_tol = 1e-10) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv[0] == 0.0) return 0;
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i) rank += sv[i] > rel_tol * sv[0] ? 1 : 0;
  return rank;
}

inline double price_under_measure(const Derivative& d, const MartingaleMeasure& q) {
  if (d.size() != q.weights.size()) {
    fail(ErrorKind::kInvalidInput, "derivative and measure dimensions differ");
  }
  return d.payoffs().dot(q.weights);
}

// D_w = f(S[asset_index, w]) for a risky asset 1 <= asset_index <= N.
inline Derivative arrow_expand(const std::function<double(double)>& f, const PriceSystem& ps,
                               Index asset_index) {
  if (asset_index < 1 || asset_index > ps.risky_count()) {
    fail(ErrorKind::kInvalidInput, "asset index " + std::to_string(asset_index) +
                                       " outside risky assets 1.." +
                                       std::to_string(ps.risky_count()));
  }
  Vector d(ps.event_count());
  for (Index w = 0; w < d.size(); ++w) {
    d[w] = f(ps.payoffs()(asset_index, w));
    if (!(d[w] >= 0.0)) {
      fail(ErrorKind::kInvalidInput, "payoff function returned a negative value at event " +
                                         std::to_string(w));
    }
  }
  return Derivative(std::move(d));
}

}  // namespace martprice
