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

// Parameter scans over the discretized BSM market, run on a bounded worker
// pool, and their CSV rendering.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "martprice/bsm.hpp"
#include "martprice/errors.hpp"
#include "martprice/rng.hpp"
#include "martprice/simplex.hpp"
#include "martprice/zsg.hpp"

namespace martprice {

enum class ScanVar { kEta, kMu, kSigma, kStrike, kSpot };

inline const char* to_string(ScanVar v) {
  switch (v) {
    case ScanVar::kEta: return "eta";
    case ScanVar::kMu: return "mu";
    case ScanVar::kSigma: return "sigma";
    case ScanVar::kStrike: return "strike";
    case ScanVar::kSpot: return "spot";
  }
  return "?";
}

inline ScanVar parse_scan_var(const std::string& s) {
  if (s == "eta") return ScanVar::kEta;
  if (s == "mu") return ScanVar::kMu;
  if (s == "sigma") return ScanVar::kSigma;
  if (s == "strike") return ScanVar::kStrike;
  if (s == "spot") return ScanVar::kSpot;
  fail(ErrorKind::kParse, "unknown scan variable \"" + s + "\"");
}

namespace detail {

inline double parse_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    fail(ErrorKind::kParse, "grid: cannot parse number \"" + s + "\"");
  }
  if (used != s.size() || !std::isfinite(v)) fail(ErrorKind::kParse, "grid: bad number \"" + s + "\"");
  return v;
}

inline std::vector<std::string> split(const std::string& s, const std::string& sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  for (;;) {
    const std::size_t next = s.find(sep, pos);
    out.push_back(s.substr(pos, next == std::string::npos ? std::string::npos : next - pos));
    if (next == std::string::npos) break;
    pos = next + sep.size();
  }
  return out;
}

}  // namespace detail

// Grid syntax:
//   "a:b[:n]"    n log-spaced points (default 20), a, b > 0
//   "a..b[:n]"   n linearly spaced points; default unit steps from a
//   "x,y,z"      explicit list
inline std::vector<double> parse_grid(const std::string& text) {
  if (text.empty()) fail(ErrorKind::kParse, "grid is empty");
  std::vector<double> out;
  auto count_of = [](const std::string& s) {
    const double n = detail::parse_double(s);
    if (n < 1 || n != std::floor(n)) fail(ErrorKind::kParse, "grid: point count must be a positive integer");
    return static_cast<int>(n);
  };
  if (text.find("..") != std::string::npos) {
    const auto parts = detail::split(text, "..");
    if (parts.size() != 2) fail(ErrorKind::kParse, "grid: expected a..b");
    const auto tail = detail::split(parts[1], ":");
    if (tail.size() > 2) fail(ErrorKind::kParse, "grid: expected a..b[:n]");
    const double a = detail::parse_double(parts[0]);
    const double b = detail::parse_double(tail[0]);
    if (b < a) fail(ErrorKind::kParse, "grid: upper end below lower end");
    if (tail.size() == 2) {
      const int n = count_of(tail[1]);
      for (int i = 0; i < n; ++i) out.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
    } else {
      for (int i = 0; a + i <= b + 1e-12; ++i) out.push_back(a + i);
    }
    return out;
  }
  if (text.find(':') != std::string::npos) {
    const auto parts = detail::split(text, ":");
    if (parts.size() < 2 || parts.size() > 3) fail(ErrorKind::kParse, "grid: expected a:b[:n]");
    const double a = detail::parse_double(parts[0]);
    const double b = detail::parse_double(parts[1]);
    const int n = parts.size() == 3 ? count_of(parts[2]) : 20;
    if (!(a > 0.0 && b > 0.0)) fail(ErrorKind::kParse, "grid: log spacing needs positive ends");
    const double la = std::log(a), lb = std::log(b);
    for (int i = 0; i < n; ++i) {
      out.push_back(n == 1 ? a : std::exp(la + (lb - la) * i / (n - 1)));
    }
    if (n > 1) out.back() = b;
    return out;
  }
  for (const std::string& tok : detail::split(text, ",")) out.push_back(detail::parse_double(tok));
  return out;
}

enum class ExperimentSolver { kSimplex, kZsg };

struct ExperimentConfig {
  BsmSpec base;  // defaults: Pi=10, mu=1, sigma=1, K0=50
  OptionKind kind = OptionKind::kCall;
  double strike = 10.0;
  std::optional<double> eta;
  ExperimentSolver solver = ExperimentSolver::kSimplex;
  double zsg_eps = 0.01;
  double zsg_delta = 0.1;
  double zsg_iteration_scale = 1.0;
  std::uint64_t seed = 0;
};

struct ExperimentRow {
  std::string scan_var;
  double value = 0.0;
  std::optional<double> eta;
  std::string solver;
  double lp_min = std::numeric_limits<double>::quiet_NaN();
  double lp_max = std::numeric_limits<double>::quiet_NaN();
  double analytic_discrete = std::numeric_limits<double>::quiet_NaN();
  double analytic_closed = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t seed = 0;
  std::string status;
  double runtime_ms = 0.0;
};

inline ExperimentRow run_point(const ExperimentConfig& cfg, ScanVar var, double value,
                               std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentRow row;
  row.scan_var = to_string(var);
  row.value = value;
  row.solver = cfg.solver == ExperimentSolver::kSimplex ? "simplex" : "zsg";
  row.seed = seed;
  BsmSpec spec = cfg.base;
  double strike = cfg.strike;
  std::optional<double> eta = cfg.eta;
  switch (var) {
    case ScanVar::kEta: eta = value; break;
    case ScanVar::kMu: spec.mu = value; break;
    case ScanVar::kSigma: spec.sigma = value; break;
    case ScanVar::kStrike: strike = value; break;
    case ScanVar::kSpot: spec.pi = value; break;
  }
  row.eta = eta;
  try {
    const DiscretizedBsm m = build(spec);
    const Derivative d = option_derivative(m, cfg.kind, strike);
    const AnalyticPrice ap = analytic_price(m, cfg.kind, strike);
    row.analytic_discrete = ap.discrete;
    row.analytic_closed = ap.closed_form;
    if (cfg.solver == ExperimentSolver::kSimplex) {
      const RnInterval iv = rn_interval(m, d, eta);
      row.lp_min = iv.min.value;
      row.lp_max = iv.max.value;
      row.status = iv.optimal() ? "optimal"
                                : std::string("min=") + to_string(iv.min.status) +
                                      ";max=" + to_string(iv.max.status);
    } else if (eta) {
      row.status = "unsupported: regularized LP needs the simplex solver";
    } else {
      ZsgOptions zo;
      zo.iteration_scale = cfg.zsg_iteration_scale;
      const CounterRng rng(seed);
      const auto lo = price_absolute(m.price_system, d, Sense::kMin, cfg.zsg_eps, cfg.zsg_delta,
                                     rng.split(0)(), zo);
      const auto hi = price_absolute(m.price_system, d, Sense::kMax, cfg.zsg_eps, cfg.zsg_delta,
                                     rng.split(1)(), zo);
      row.lp_min = lo.price;
      row.lp_max = hi.price;
      row.status = "optimal";
    }
  } catch (const std::exception& e) {
    row.status = std::string("error: ") + e.what();
  }
  row.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return row;
}

// Worker count from MARTINPRICE_THREADS, else the hardware concurrency.
inline std::size_t worker_count() {
  if (const char* env = std::getenv("MARTINPRICE_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

// Rows come back in grid order whatever the completion order.
inline std::vector<ExperimentRow> run_experiment(const ExperimentConfig& cfg, ScanVar var,
                                                 const std::vector<double>& grid,
                                                 std::size_t threads = worker_count()) {
  if (grid.empty()) fail(ErrorKind::kInvalidInput, "experiment grid is empty");
  std::vector<ExperimentRow> rows(grid.size());
  const CounterRng root(cfg.seed);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      rows[i] = run_point(cfg, var, grid[i], root.split(i)());
    }
  };
  const std::size_t n = std::min(std::max<std::size_t>(threads, 1), grid.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n; ++t) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  return rows;
}

// Shortest round-trip decimal; empty for missing or non-finite values.
inline std::string format_number(double v) {
  if (!std::isfinite(v)) return "";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline constexpr const char* kCsvHeader =
    "scan_var,value,eta,solver,lp_min,lp_max,analytic_discrete,analytic_closed,seed,status,runtime_ms";

inline std::string to_csv(const ExperimentRow& r) {
  std::string line = csv_field(r.scan_var);
  line += ',' + format_number(r.value);
  line += ',' + (r.eta ? format_number(*r.eta) : std::string());
  line += ',' + csv_field(r.solver);
  line += ',' + format_number(r.lp_min);
  line += ',' + format_number(r.lp_max);
  line += ',' + format_number(r.analytic_discrete);
  line += ',' + format_number(r.analytic_closed);
  line += ',' + std::to_string(r.seed);
  line += ',' + csv_field(r.status);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", r.runtime_ms);
  line += ',';
  line += buf;
  return line;
}

// RFC-4180 line endings.
inline void write_csv(std::ostream& out, const std::vector<ExperimentRow>& rows) {
  out << kCsvHeader << "\r\n";
  for (const auto& r : rows) out << to_csv(r) << "\r\n";
}

}  // namespace martprice
