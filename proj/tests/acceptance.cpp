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

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. All tolerances are fixed below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "martprice.hpp"
#include "oracles.hpp"

namespace mp = martprice;
namespace mt = martprice::testing;

namespace {

// Cross-solver agreement.
constexpr int kAgreementMarkets = 50;
constexpr double kExactTol = 1e-8;
constexpr double kZsgEps = 0.05;
constexpr double kZsgDelta = 0.1;
constexpr double kZsgSuccessRate = 0.90;
constexpr double kAgreementBudgetSec = 120.0;
// Fraction of the worst-case iteration count T played per round. Full T for
// these 50 markets is about 7e10 iterations (r reaches ~20, and T grows with
// (r+1)^2), far beyond the time budget on one core.
constexpr double kZsgIterationScale = 0.02;

// Complete-market collapse.
constexpr int kCompleteMarkets = 25;

// Farkas exclusivity.
constexpr int kFarkasMarkets = 1000;
constexpr double kVerdictTol = 1e-7;

// BSM experiments.
constexpr double kContainmentBudgetSec = 60.0;
constexpr double kNarrowingRelTol = 0.02;
constexpr double kDriftSpreadTol = 1e-10;

// Min-norm property.
constexpr int kMinNormSystems = 100;
constexpr int kSamplesPerSystem = 20;
constexpr double kMinNormSlack = 1e-9;

// Put scenario comparison values (logged, never asserted).
constexpr double kReferencePutPrice = 62.5;
constexpr double kReferencePutDmax = 148.0;
constexpr double kReferencePutRho = 2.0;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(bool pass, const char* name, const std::string& detail) {
  std::printf("%s %s: %s\n", pass ? "PASS" : "FAIL", name, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

void info(const char* name, const std::string& detail) {
  std::printf("INFO %s: %s\n", name, detail.c_str());
  std::fflush(stdout);
}

template <typename... Args>
std::string fmtn(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}


// Criteria 1 and 4 share the same ZSG runs.
void agreement_and_feasibility() {
  const auto t0 = Clock::now();
  int exact_ok = 0, exact_total = 0;
  double worst_exact = 0.0;
  int zsg_ok = 0, zsg_total = 0;
  double worst_zsg = 0.0;
  int feasible_ok = 0;
  double worst_violation = 0.0;
  std::size_t iterations = 0;

  mp::ZsgOptions zopt;
  zopt.iteration_scale = kZsgIterationScale;
  for (int i = 0; i < kAgreementMarkets; ++i) {
    std::mt19937_64 rng(1000 + static_cast<std::uint64_t>(i));
    const mp::Index assets = 2 + i % 3;
    const mp::Index events = 4 + (i / 3) % 5;
    const mp::PriceSystem ps = mt::random_arbitrage_free(rng, assets, events);
    const mp::Derivative d(mt::random_derivative(rng, events));
    const mt::VertexBounds oracle = mt::enumerate_vertices(ps, d.payoffs());

    for (mp::Sense sense : {mp::Sense::kMin, mp::Sense::kMax}) {
      const mp::SimplexSolution sol = mp::solve(ps, d, sense);
      const double ref = sense == mp::Sense::kMax ? oracle.max : oracle.min;
      ++exact_total;
      if (sol.optimal() && oracle.feasible()) {
        const double err = std::abs(sol.objective - ref);
        worst_exact = std::max(worst_exact, err);
        exact_ok += err <= kExactTol;
      }

      const std::uint64_t seed = 7000 + 2 * static_cast<std::uint64_t>(i) + (sense == mp::Sense::kMax);
      const mp::ZsgPriceResult z = mp::price_absolute(ps, d, sense, kZsgEps, kZsgDelta, seed, zopt);
      iterations += z.iterations_total;
      ++zsg_total;
      if (sol.optimal()) {
        const double err = std::abs(z.price - sol.objective) / d.d_max();
        worst_zsg = std::max(worst_zsg, err);
        zsg_ok += err <= kZsgEps;
      }
      const mp::StandardFormLP lp = mp::to_standard_form(ps, d, sense);
      const mp::Vector& q = z.measure.weights;
      const double violation = std::max((lp.a * q - lp.c).maxCoeff(), std::abs(q.sum() - 1.0));
      worst_violation = std::max(worst_violation, violation);
      feasible_ok += mp::epsilon_feasible(lp, q, kZsgEps);
    }
  }
  const double elapsed = seconds_since(t0);
  const double rate = static_cast<double>(zsg_ok) / zsg_total;

  report(exact_ok == exact_total && rate >= kZsgSuccessRate && elapsed < kAgreementBudgetSec,
         "cross-solver agreement",
         fmtn("simplex vs vertex enumeration %d/%d within %.0e (worst %.2e); "
              "zsg within %.2f*d_max in %d/%d runs (%.0f%%, need %.0f%%, worst %.3f); "
              "iteration scale %.3g, %zu iterations; %.1f s (budget %.0f s)",
              exact_ok, exact_total, kExactTol, worst_exact, kZsgEps, zsg_ok, zsg_total, 100.0 * rate,
              100.0 * kZsgSuccessRate, worst_zsg, kZsgIterationScale, iterations, elapsed,
              kAgreementBudgetSec));
  report(feasible_ok == zsg_total, "zsg eps-feasibility",
         fmtn("A q <= c + %.2f and |sum q - 1| <= %.2f on %d/%d runs (worst excess %.4f)", kZsgEps,
              kZsgEps, feasible_ok, zsg_total, worst_violation));
}

void complete_collapse() {
  int ok = 0;
  double worst = 0.0;
  int lsq = 0;
  for (int i = 0; i < kCompleteMarkets; ++i) {
    std::mt19937_64 rng(2000 + static_cast<std::uint64_t>(i));
    const mp::Index assets = 2 + i % 3;
    const mp::PriceSystem ps = mt::random_complete(rng, assets);
    const mp::Derivative d(mt::random_derivative(rng, assets));
    const mp::SimplexSolution lo = mp::solve(ps, d, mp::Sense::kMin);
    const mp::SimplexSolution hi = mp::solve(ps, d, mp::Sense::kMax);
    if (!lo.optimal() || !hi.optimal()) continue;
    try {
      const mp::PinvPrice pv = mp::pinv_price(ps, d);
      const double spread = std::max({std::abs(hi.objective - lo.objective),
                                      std::abs(pv.price - lo.objective),
                                      std::abs(pv.price - hi.objective)});
      worst = std::max(worst, spread);
      ok += spread <= kExactTol;
      lsq += pv.report.is_least_squares_market;
    } catch (const mp::PricingError&) {
    }
  }
  report(ok == kCompleteMarkets && lsq == kCompleteMarkets, "complete-market collapse",
         fmtn("min = max = pinv within %.0e on %d/%d markets (worst %.2e); least-squares market on %d/%d",
              kExactTol, ok, kCompleteMarkets, worst, lsq, kCompleteMarkets));
}

bool measure_verifies(const mp::PriceSystem& ps, const mp::MartingaleMeasure& m) {
  const mp::Vector& q = m.weights;
  if (q.size() != ps.event_count() || q.minCoeff() < -kVerdictTol) return false;
  return (ps.payoffs() * q - ps.prices()).lpNorm<Eigen::Infinity>() <= kVerdictTol;
}

void farkas_exclusivity() {
  int measures = 0, certificates = 0, doubles = 0, zeros = 0;
  for (int i = 0; i < kFarkasMarkets; ++i) {
    std::mt19937_64 rng(3000 + static_cast<std::uint64_t>(i));
    const mp::Index assets = 2 + i % 3;
    const mp::Index events = 2 + (i / 3) % 5;
    const mp::PriceSystem ps = mt::random_small_market(rng, assets, events);
    // Independent feasibility oracle: some vertex of {q >= 0, Sq = Pi} exists.
    const bool oracle_feasible = mt::enumerate_vertices(ps, mp::Vector::Zero(events)).feasible();
    bool has_measure = false, has_certificate = false;
    try {
      const mp::ArbitrageVerdict v = mp::detect_arbitrage(ps, kVerdictTol);
      if (const auto* m = std::get_if<mp::MartingaleMeasure>(&v)) {
        has_measure = measure_verifies(ps, *m);
      } else {
        has_certificate = std::get<mp::ArbitrageCertificate>(v).verify(ps, kVerdictTol);
      }
    } catch (const mp::PricingError&) {
    }
    // A verified verdict that contradicts the oracle means both objects exist.
    if ((has_measure && !oracle_feasible) || (has_certificate && oracle_feasible)) {
      ++doubles;
    } else if (has_measure) {
      ++measures;
    } else if (has_certificate) {
      ++certificates;
    } else {
      ++zeros;
    }
  }
  report(doubles == 0 && zeros == 0, "Farkas exclusivity",
         fmtn("%d markets: %d verified measures, %d verified certificates, %d double, %d zero verdicts",
              kFarkasMarkets, measures, certificates, doubles, zeros));
}

void bsm_containment() {
  const auto t0 = Clock::now();
  const mp::BsmSpec spec;  // Pi=10, mu=1, sigma=1, K0=50
  const mp::DiscretizedBsm m = mp::build(spec);
  const mp::Derivative d = mp::call_payoff(m, 10.0);
  const double analytic = mp::analytic_price(m, mp::OptionKind::kCall, 10.0).discrete;
  const mp::RnInterval iv = mp::rn_interval(m, d, std::nullopt);
  const double elapsed = seconds_since(t0);
  const bool contained = iv.optimal() && iv.min.value <= analytic && analytic <= iv.max.value;
  report(contained && elapsed < kContainmentBudgetSec, "BSM containment",
         fmtn("K=%ld, lp_min %.6f <= analytic %.6f <= lp_max %.6f; %.2f s (budget %.0f s)",
              static_cast<long>(m.events()), iv.min.value, analytic, iv.max.value, elapsed,
              kContainmentBudgetSec));
}

struct NarrowingScan {
  bool pass = true;
  std::string detail;
};

NarrowingScan narrowing_scan(double mu) {
  const std::vector<double> etas = {10.0, 1.0, 0.5, 0.2, 0.001};
  mp::BsmSpec spec;
  spec.mu = mu;
  const mp::DiscretizedBsm m = mp::build(spec);
  const mp::Derivative d = mp::call_payoff(m, 10.0);
  const double analytic = mp::analytic_price(m, mp::OptionKind::kCall, 10.0).discrete;
  NarrowingScan out;
  out.detail = fmtn("mu=%g, analytic %.6f; widths", mu, analytic);
  double prev = std::numeric_limits<double>::infinity();
  mp::RnInterval last;
  for (double eta : etas) {
    last = mp::rn_interval(m, d, eta);
    if (!last.optimal()) {
      out.pass = false;
      out.detail += fmtn(" eta=%g:%s", eta, mp::to_string(last.min.status));
      continue;
    }
    const double w = last.width();
    out.detail += fmtn(" eta=%g:%.4f", eta, w);
    if (w > prev + 1e-9) out.pass = false;
    prev = w;
  }
  if (last.optimal()) {
    const bool inside = last.min.value >= analytic * (1.0 - kNarrowingRelTol) &&
                        last.max.value <= analytic * (1.0 + kNarrowingRelTol);
    out.pass = out.pass && inside;
    out.detail += fmtn("; at eta=0.001 [%.4f, %.4f] vs +-%.0f%% band [%.4f, %.4f]", last.min.value,
                       last.max.value, 100.0 * kNarrowingRelTol, analytic * (1.0 - kNarrowingRelTol),
                       analytic * (1.0 + kNarrowingRelTol));
  } else {
    out.detail += "; no interval at eta=0.001";
  }
  return out;
}

void regularization_narrowing() {
  // The base experiment has mu=1. A smooth density x must lower E[S] from
  // Pi e^mu to Pi, which needs |x(w+1)/x(w) - 1| of about 1 - exp(-theta dB)
  // = 0.11 per grid step, so the strongest setting is infeasible there.
  const NarrowingScan base = narrowing_scan(1.0);
  report(base.pass, "regularization narrowing", base.detail);
  const NarrowingScan driftless = narrowing_scan(0.0);
  info("regularization narrowing (driftless)",
       std::string(driftless.pass ? "holds: " : "does not hold: ") + driftless.detail);
}

void drift_invariance() {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  std::string values;
  for (double mu : {0.0, 0.5, 1.0}) {
    mp::BsmSpec spec;
    spec.mu = mu;
    const double v = mp::analytic_price(mp::build(spec), mp::OptionKind::kCall, 10.0).discrete;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    values += fmtn(" mu=%g:%.15g", mu, v);
  }
  report(hi - lo <= kDriftSpreadTol, "drift invariance",
         fmtn("discrete call price%s; spread %.2e (tol %.0e)", values.c_str(), hi - lo, kDriftSpreadTol));
}

void min_norm() {
  int systems_ok = 0;
  int oracle_ok = 0;
  double worst_gap = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < kMinNormSystems; ++i) {
    std::mt19937_64 rng(4000 + static_cast<std::uint64_t>(i));
    const mp::Index assets = 2 + i % 3;
    const mp::Index events = assets + 1 + (i / 3) % 4;
    const mp::Matrix s = mt::random_payoffs(rng, assets, events);
    const mp::Vector q0 = mt::dirichlet(rng, events);
    const mp::PriceSystem ps(s * q0, s);
    const mp::PinvReport rep = mp::pinv_solve(ps);
    const double norm_plus = rep.q_plus.norm();

    const Eigen::MatrixXd dense = s;
    const Eigen::MatrixXd kernel = Eigen::FullPivLU<Eigen::MatrixXd>(dense).kernel();
    std::normal_distribution<double> g(0.0, 1.0);
    bool all = norm_plus <= q0.norm() + kMinNormSlack;
    worst_gap = std::max(worst_gap, norm_plus - q0.norm());
    for (int k = 0; k < kSamplesPerSystem; ++k) {
      Eigen::VectorXd z(kernel.cols());
      for (Eigen::Index c = 0; c < z.size(); ++c) z[c] = g(rng);
      // Stay inside the simplex so every sample is a feasible measure.
      Eigen::VectorXd dir = kernel * z;
      double t = 1.0;
      for (Eigen::Index j = 0; j < dir.size(); ++j) {
        if (dir[j] < 0.0) t = std::min(t, q0[j] / -dir[j]);
      }
      std::uniform_real_distribution<double> u(0.0, 1.0);
      const mp::Vector q = q0 + u(rng) * t * dir;
      if ((s * q - ps.prices()).lpNorm<Eigen::Infinity>() > 1e-10 || q.minCoeff() < -1e-12) continue;
      worst_gap = std::max(worst_gap, norm_plus - q.norm());
      all = all && norm_plus <= q.norm() + kMinNormSlack;
    }
    systems_ok += all;
    oracle_ok += (rep.q_plus - mt::normal_equation_pinv(s, ps.prices())).lpNorm<Eigen::Infinity>() <= 1e-9;
  }
  report(systems_ok == kMinNormSystems && oracle_ok == kMinNormSystems, "min-norm pseudoinverse",
         fmtn("||q+|| <= ||q|| + %.0e for every sampled feasible q on %d/%d systems (max gap %.2e); "
              "normal-equation oracle match on %d/%d",
              kMinNormSlack, systems_ok, kMinNormSystems, worst_gap, oracle_ok, kMinNormSystems));
}

void put_scenario() {
  mp::BsmSpec spec;
  spec.pi = 100.0;
  spec.mu = 1.0;
  spec.sigma = 2.0;
  bool ok = false;
  std::string detail;
  try {
    const mp::ScenarioReport r = mp::scenario_report(spec, mp::OptionKind::kPut, 150.0);
    ok = r.interval.optimal() && std::isfinite(r.d_max) && std::isfinite(r.rho) &&
         std::isfinite(r.analytic.discrete);
    detail = fmtn("put Pi=100 Z=150 mu=1 sigma=2: analytic discrete %.3f, closed form %.3f, "
                  "lp [%.3f, %.3f], D_max %.3f, rho %.3f (vs analytic %.3f); reference values price %.1f, D_max %.0f, "
                  "rho ~%.0f (not asserted)",
                  r.analytic.discrete, r.analytic.closed_form, r.interval.min.value,
                  r.interval.max.value, r.d_max, r.rho, r.rho_analytic, kReferencePutPrice, kReferencePutDmax,
                  kReferencePutRho);
  } catch (const mp::PricingError& e) {
    detail = std::string("scenario failed: ") + e.what();
  }
  report(ok, "put scenario reported", detail);
}

}  // namespace

int main() {
  agreement_and_feasibility();
  complete_collapse();
  farkas_exclusivity();
  bsm_containment();
  regularization_narrowing();
  drift_invariance();
  min_norm();
  put_scenario();
  std::printf("%s: %d criterion failure(s)\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
  return failures == 0 ? 0 : 1;
}
