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

// Classical zero-sum-game pricing: multiplicative weights with exact Gibbs
// sampling, bisection on the normalized price level, and a doubling wrapper
// for relative error.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "martprice/embedding.hpp"
#include "martprice/errors.hpp"
#include "martprice/linalg.hpp"
#include "martprice/market.hpp"
#include "martprice/rng.hpp"

namespace martprice {

// Which player's accumulated strategy is passed in.
enum class StrategySide {
  kRow,     // v = x over rows; result is softmax(-F^T x) over columns
  kColumn,  // v = y over columns; result is softmax(F y) over rows
};

inline Vector softmax(const Vector& logits) {
  const double hi = logits.maxCoeff();
  Vector w = (logits.array() - hi).exp().matrix();
  return w / w.sum();
}

inline Vector gibbs_distribution(const Matrix& f, const Vector& v, StrategySide side) {
  if (side == StrategySide::kRow) {
    if (v.size() != f.rows()) fail(ErrorKind::kInvalidInput, "row strategy length mismatch");
    return softmax(-(f.transpose() * v));
  }
  if (v.size() != f.cols()) fail(ErrorKind::kInvalidInput, "column strategy length mismatch");
  return softmax(f * v);
}

inline std::size_t search_rounds(double eps) {
  return static_cast<std::size_t>(std::max(1.0, std::ceil(std::log2(1.0 / eps))));
}

// T = ceil(16 eps'^-2 ln(N1 N2 rounds / delta)), natural logarithm.
inline std::size_t iteration_count(double eps_prime, double delta, Index n1, Index n2,
                                   std::size_t rounds) {
  const double arg = static_cast<double>(n1) * static_cast<double>(n2) *
                     static_cast<double>(rounds) / delta;
  return static_cast<std::size_t>(std::ceil(16.0 / (eps_prime * eps_prime) * std::log(arg)));
}

inline std::size_t value_sample_count(double eps_prime, double delta) {
  return static_cast<std::size_t>(
      std::max(1.0, std::ceil(std::log(1.0 / delta) / (eps_prime * eps_prime))));
}

struct GameState {
  Vector x;  // row player, length N1
  Vector y;  // column player, length N2
  double eta = 0.0;
  std::size_t t = 0;
  std::uint64_t seed = 0;
};

struct PlayOptions {
  std::size_t search_rounds = 1;  // enters the log factor of T
  double iteration_scale = 1.0;
  std::optional<std::size_t> iterations;  // overrides T entirely
};

struct GameRun {
  GameState state;
  double lambda = 0.0;  // sampled estimate of the game value
  std::size_t samples = 0;
};

namespace detail {

// Index i with cum[i-1] <= u * total < cum[i], counted without branches.
inline std::size_t sample_prefix(const double* cum, Index n, double u) {
  const double target = u * cum[n - 1];
  std::size_t idx = 0;
  for (Index i = 0; i + 1 < n; ++i) idx += cum[i] <= target;
  return idx;
}

// Multiplies w by f entrywise and rebuilds the prefix sums.
inline void scale_weights(double* w, double* cum, const double* f, Index n) {
  double acc = 0.0;
  for (Index i = 0; i < n; ++i) {
    w[i] *= f[i];
    acc += w[i];
    cum[i] = acc;
  }
}

inline std::size_t sample_counts(const std::vector<std::uint64_t>& cumulative, double u) {
  const auto total = static_cast<double>(cumulative.back());
  const auto target = static_cast<std::uint64_t>(u * total);
  return static_cast<std::size_t>(
      std::upper_bound(cumulative.begin(), cumulative.end(), target) - cumulative.begin());
}

}  // namespace detail

// Runs the sampled multiplicative-weights dynamics on F for T iterations and
// estimates x^T F y from independent index pairs drawn from the final
// strategies. Gibbs weights are updated multiplicatively and resynchronized
// from the exact logits every few hundred steps.
inline GameRun play_game(const Matrix& f, double eps_prime, double delta, std::uint64_t seed,
                         const PlayOptions& opt = {}) {
  if (!(eps_prime > 0.0 && eps_prime < 1.0 + 1e-12)) {
    fail(ErrorKind::kInvalidInput, "eps' must lie in (0, 1]");
  }
  if (!(delta > 0.0 && delta < 1.0)) fail(ErrorKind::kInvalidInput, "delta must lie in (0, 1)");
  const Index n1 = f.rows();
  const Index n2 = f.cols();
  const double eta = eps_prime / 4.0;
  std::size_t iters = opt.iterations.value_or(static_cast<std::size_t>(std::ceil(
      opt.iteration_scale *
      static_cast<double>(iteration_count(eps_prime, delta, n1, n2, opt.search_rounds)))));
  iters = std::max<std::size_t>(iters, 1);

  // up(j, i) = exp(eta F(i, j)) scales row weights when y_j grows;
  // down(i, j) = exp(-eta F(i, j)) scales column weights when x_i grows.
  const Matrix up = (eta * f.transpose()).array().exp().matrix();
  const Matrix down = (-eta * f).array().exp().matrix();

  const auto n1s = static_cast<std::size_t>(n1);
  const auto n2s = static_cast<std::size_t>(n2);
  std::vector<double> row_w(n1s, 1.0), row_cum(n1s);
  std::vector<double> col_w(n2s, 1.0), col_cum(n2s);
  std::vector<std::uint64_t> cnt_x(n1s, 0);
  std::vector<std::uint64_t> cnt_y(n2s, 0);
  for (std::size_t i = 0; i < n1s; ++i) row_cum[i] = static_cast<double>(i + 1);
  for (std::size_t j = 0; j < n2s; ++j) col_cum[j] = static_cast<double>(j + 1);

  auto resync = [&] {
    Vector yc(n2), xc(n1);
    for (Index j = 0; j < n2; ++j) yc[j] = eta * static_cast<double>(cnt_y[static_cast<std::size_t>(j)]);
    for (Index i = 0; i < n1; ++i) xc[i] = eta * static_cast<double>(cnt_x[static_cast<std::size_t>(i)]);
    const Vector pr = gibbs_distribution(f, yc, StrategySide::kColumn);
    const Vector pc = gibbs_distribution(f, xc, StrategySide::kRow);
    // Weights this small are never sampled; zeroing them keeps the
    // multiplicative updates away from subnormal arithmetic.
    constexpr double kNegligible = 1e-200;
    double acc = 0.0;
    for (std::size_t i = 0; i < n1s; ++i) {
      const double w = pr[static_cast<Index>(i)];
      row_w[i] = w < kNegligible ? 0.0 : w;
      acc += row_w[i];
      row_cum[i] = acc;
    }
    acc = 0.0;
    for (std::size_t j = 0; j < n2s; ++j) {
      const double w = pc[static_cast<Index>(j)];
      col_w[j] = w < kNegligible ? 0.0 : w;
      acc += col_w[j];
      col_cum[j] = acc;
    }
  };

  CounterRng rng(seed);
  constexpr std::size_t kResync = 256;
  constexpr double kHalfWord = 0x1.0p-32;
  for (std::size_t t = 0; t < iters; ++t) {
    // One 64-bit draw feeds both players with 32 bits each.
    const std::uint64_t bits = rng();
    const std::size_t k = detail::sample_prefix(col_cum.data(), n2, static_cast<double>(bits >> 32) * kHalfWord);
    const std::size_t kp =
        detail::sample_prefix(row_cum.data(), n1, static_cast<double>(bits & 0xffffffffULL) * kHalfWord);
    ++cnt_y[k];
    ++cnt_x[kp];
    if ((t + 1) % kResync == 0) {
      resync();
      continue;
    }
    detail::scale_weights(row_w.data(), row_cum.data(), up.data() + static_cast<Index>(k) * n1, n1);
    detail::scale_weights(col_w.data(), col_cum.data(), down.data() + static_cast<Index>(kp) * n2, n2);
  }

  GameRun run;
  run.state.eta = eta;
  run.state.t = iters;
  run.state.seed = seed;
  run.state.x.resize(n1);
  run.state.y.resize(n2);
  for (Index i = 0; i < n1; ++i) run.state.x[i] = eta * static_cast<double>(cnt_x[static_cast<std::size_t>(i)]);
  for (Index j = 0; j < n2; ++j) run.state.y[j] = eta * static_cast<double>(cnt_y[static_cast<std::size_t>(j)]);

  std::vector<std::uint64_t> cum_x(cnt_x.size()), cum_y(cnt_y.size());
  std::partial_sum(cnt_x.begin(), cnt_x.end(), cum_x.begin());
  std::partial_sum(cnt_y.begin(), cnt_y.end(), cum_y.begin());
  run.samples = value_sample_count(eps_prime, delta);
  CounterRng value_rng = rng.split(0x5a17);
  double acc = 0.0;
  for (std::size_t s = 0; s < run.samples; ++s) {
    const std::size_t i = detail::sample_counts(cum_x, value_rng.uniform());
    const std::size_t j = detail::sample_counts(cum_y, value_rng.uniform());
    acc += f(static_cast<Index>(i), static_cast<Index>(j));
  }
  run.lambda = acc / static_cast<double>(run.samples);
  return run;
}

inline GameRun play_game(const GameEmbedding& emb, double eps_prime, double delta,
                         std::uint64_t seed, const PlayOptions& opt = {}) {
  return play_game(emb.f, eps_prime, delta, seed, opt);
}

// A q <= c + eps componentwise and |sum q - 1| <= eps.
inline bool epsilon_feasible(const StandardFormLP& lp, const Vector& q, double eps) {
  if (q.size() != lp.events()) return false;
  return (lp.a * q - lp.c).maxCoeff() <= eps && std::abs(q.sum() - 1.0) <= eps;
}

struct ZsgOptions {
  double iteration_scale = 1.0;
  std::optional<double> r;           // skip the dual solve
  std::optional<double> r_fallback;  // used if the dual solve fails
};

struct ZsgRound {
  double alpha = 0.0;
  double lambda = 0.0;
  bool feasible = false;
};

struct ZsgPriceResult {
  Sense sense = Sense::kMax;
  double alpha_final = 0.0;
  double price = 0.0;
  double eps = 0.0;
  double eps_prime = 0.0;
  double delta = 0.0;
  double r = 1.0;
  bool r_fallback = false;
  double d_max = 0.0;
  std::uint64_t seed = 0;
  std::size_t rounds = 0;
  std::size_t iterations_per_round = 0;
  std::size_t iterations_total = 0;
  std::size_t samples_used = 0;
  MartingaleMeasure measure;
  Vector dual_weights;
  std::size_t measure_sparsity = 0;
  std::string log_base = "natural";
  std::vector<ZsgRound> trace;
  std::size_t halting_k = 0;  // set by price_relative
};

// Bisection over the normalized price level in [0, 1], starting at 0.5, with
// ceil(log2(1/eps)) rounds. Each round plays the game at eps' = eps/(6(r+1))
// and treats lambda <= eps' as "the bound clears alpha".
inline ZsgPriceResult price_absolute(const PriceSystem& ps, const Derivative& d, Sense sense,
                                     double eps, double delta, std::uint64_t seed,
                                     const ZsgOptions& opt = {}) {
  if (!(eps > 0.0 && eps < 1.0)) fail(ErrorKind::kInvalidInput, "eps must lie in (0, 1)");
  if (!(delta > 0.0 && delta < 1.0)) fail(ErrorKind::kInvalidInput, "delta must lie in (0, 1)");
  const StandardFormLP lp = to_standard_form(ps, d, sense);
  ZsgPriceResult res;
  res.sense = sense;
  res.eps = eps;
  res.delta = delta;
  res.seed = seed;
  res.d_max = lp.d_max;
  if (lp.zero_payoff) {
    res.eps_prime = eps / 12.0;
    return res;
  }

  if (opt.r) {
    res.r = std::max(*opt.r, 1.0);
  } else {
    const REstimate est = estimate_r(lp, opt.r_fallback);
    res.r = est.r;
    res.r_fallback = est.fallback;
  }
  res.eps_prime = eps / (6.0 * (res.r + 1.0));
  res.rounds = search_rounds(eps);

  GameEmbedding game = build_game(lp, 0.5, res.r);
  PlayOptions play;
  play.search_rounds = res.rounds;
  play.iteration_scale = opt.iteration_scale;

  double lo = 0.0, hi = 1.0, alpha = 0.5;
  std::optional<GameRun> last_feasible;
  GameRun last;
  const CounterRng root(seed);
  for (std::size_t round = 0; round < res.rounds; ++round) {
    game = game.with_alpha(alpha);
    const std::uint64_t round_seed = root.split(round)();
    last = play_game(game, res.eps_prime, delta, round_seed, play);
    res.iterations_per_round = last.state.t;
    res.iterations_total += last.state.t;
    res.samples_used += last.samples;
    const bool feasible = last.lambda <= res.eps_prime;
    res.trace.push_back({alpha, last.lambda, feasible});
    // Max bound: feasible means OPT >= alpha - eps. Min bound: OPT <= alpha + eps.
    if (feasible == (sense == Sense::kMax)) {
      lo = alpha;
    } else {
      hi = alpha;
    }
    if (feasible) last_feasible = last;
    alpha = 0.5 * (lo + hi);
  }
  res.alpha_final = alpha;
  res.price = alpha * lp.d_max;

  const GameRun& source = last_feasible ? *last_feasible : last;
  const Index k = lp.events();
  Vector q = source.state.y.head(k);
  const double mass = q.sum();
  if (mass > 0.0) q /= mass;
  res.measure_sparsity = static_cast<std::size_t>((q.array() > 0.0).count());
  res.measure = MartingaleMeasure::evaluate(ps, std::move(q));
  Vector xw = source.state.x.segment(GameEmbedding::kPriceRowsBegin, 2 * lp.assets());
  const double xmass = xw.sum();
  res.dual_weights = xmass > 0.0 ? Vector(xw / xmass) : xw;
  return res;
}

// Doubling scheme for relative error: run at precision 2^-k until
// alpha_k - 3/2^k > 0, then rerun at precision eps (alpha_k - 2^-k).
inline ZsgPriceResult price_relative(const PriceSystem& ps, const Derivative& d, Sense sense,
                                     double eps, std::uint64_t seed, const ZsgOptions& opt = {},
                                     std::size_t max_k = 20) {
  if (!(eps > 0.0 && eps < 1.0)) fail(ErrorKind::kInvalidInput, "eps must lie in (0, 1)");
  constexpr double kDelta = 0.01;
  const CounterRng root(seed);
  ZsgOptions inner = opt;
  std::size_t iterations = 0, samples = 0;
  for (std::size_t k = 1; k <= max_k; ++k) {
    const double step = std::ldexp(1.0, -static_cast<int>(k));
    ZsgPriceResult coarse = price_absolute(ps, d, sense, step, kDelta, root.split(k)(), inner);
    if (coarse.d_max == 0.0) fail(ErrorKind::kPriceFloor, "zero payoff has no relative error");
    inner.r = coarse.r;  // the dual bound does not depend on the precision
    iterations += coarse.iterations_total;
    samples += coarse.samples_used;
    if (coarse.alpha_final - 3.0 * step > 0.0) {
      ZsgPriceResult fine = price_absolute(ps, d, sense, eps * (coarse.alpha_final - step),
                                           kDelta, root.split(1000 + k)(), inner);
      fine.halting_k = k;
      fine.iterations_total += iterations;
      fine.samples_used += samples;
      fine.seed = seed;
      fine.r_fallback = coarse.r_fallback;
      return fine;
    }
  }
  fail(ErrorKind::kPriceFloor, "price indistinguishable from 0 at precision 2^-" +
                                   std::to_string(max_k));
}

struct AdvantageReport {
  double classical_queries = 0.0;
  double quantum_queries = 0.0;
  double threshold = 0.0;
  bool advantageous = false;
  std::string note = "asymptotic query counts; constants and log factors omitted";
};

// Query counts use r = ||xi*||_0 as the dual l1 bound.
inline AdvantageReport quantum_advantage_report(double n, double k, double eps, double rho,
                                                double xi_l0) {
  if (!(n > 0 && k > 0 && eps > 0 && rho > 0 && xi_l0 >= 0)) {
    fail(ErrorKind::kInvalidInput, "advantage report needs positive N, K, eps, rho");
  }
  AdvantageReport rep;
  const double r1 = xi_l0 + 1.0;
  rep.quantum_queries = (std::sqrt(n) + std::sqrt(k)) * std::pow(r1 * rho / eps, 3);
  rep.classical_queries = (n + k) * r1 * r1 * rho * rho / (eps * eps);
  rep.threshold = eps * std::sqrt(n + k) / rho;
  rep.advantageous = xi_l0 <= rep.threshold;
  return rep;
}

}  // namespace martprice
