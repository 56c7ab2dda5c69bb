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

// JSON ingestion of market and derivative specs, and JSON views of results.

#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "martprice/arbitrage.hpp"
#include "martprice/bsm.hpp"
#include "martprice/errors.hpp"
#include "martprice/market.hpp"
#include "martprice/pinv.hpp"
#include "martprice/simplex.hpp"
#include "martprice/zsg.hpp"

namespace martprice {

using Json = nlohmann::json;

struct MarketInput {
  PriceSystem ps;
  std::optional<DiscretizedBsm> bsm;
};

namespace detail {

[[noreturn]] inline void parse_error(const std::string& what) { fail(ErrorKind::kParse, what); }

inline void require_keys(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) parse_error(where + ": expected a JSON object");
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) parse_error(where + ": unknown key \"" + item.key() + "\"");
  }
}

inline double number(const Json& j, const std::string& where) {
  if (!j.is_number()) parse_error(where + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) parse_error(where + ": non-finite number");
  return v;
}

inline double number_field(const Json& j, const char* key, const std::string& where,
                           std::optional<double> fallback = std::nullopt) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    parse_error(where + ": missing \"" + key + "\"");
  }
  return number(j.at(key), where + "." + key);
}

inline Vector vector_of(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) parse_error(where + ": expected a non-empty array");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v[static_cast<Index>(i)] = number(j[i], where + "[" + std::to_string(i) + "]");
  }
  return v;
}

inline Matrix matrix_of(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) parse_error(where + ": expected a non-empty array of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  Matrix m(static_cast<Index>(j.size()), static_cast<Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    const Vector row = vector_of(j[r], where + "[" + std::to_string(r) + "]");
    if (static_cast<std::size_t>(row.size()) != cols) parse_error(where + ": ragged rows");
    m.row(static_cast<Index>(r)) = row.transpose();
  }
  return m;
}

}  // namespace detail

// Accepts inline JSON (text starting with '{') or a path to a JSON file.
inline Json load_json(const std::string& arg) {
  std::string text;
  const auto first = arg.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && arg[first] == '{') {
    text = arg;
  } else {
    std::ifstream in(arg);
    if (!in) detail::parse_error("cannot open " + arg);
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    detail::parse_error(std::string("invalid JSON: ") + e.what());
  }
}

inline BsmSpec parse_bsm_spec(const Json& j) {
  detail::require_keys(j, {"generator", "pi", "mu", "sigma", "k0", "half_sigma_sign"}, "bsm market");
  BsmSpec spec;
  spec.pi = detail::number_field(j, "pi", "bsm", spec.pi);
  spec.mu = detail::number_field(j, "mu", "bsm", spec.mu);
  spec.sigma = detail::number_field(j, "sigma", "bsm", spec.sigma);
  if (j.contains("k0")) {
    if (!j.at("k0").is_number_integer()) detail::parse_error("bsm.k0: expected an integer");
    spec.k0 = j.at("k0").get<int>();
  }
  if (j.contains("half_sigma_sign")) {
    const Json& s = j.at("half_sigma_sign");
    if (s == "-") {
      spec.convention = HalfSigmaSign::kMinus;
    } else if (s == "+") {
      spec.convention = HalfSigmaSign::kPlus;
    } else {
      detail::parse_error("bsm.half_sigma_sign: expected \"-\" or \"+\"");
    }
  }
  try {
    spec.validate();
  } catch (const PricingError& e) {
    detail::parse_error(e.what());
  }
  return spec;
}

inline MarketInput parse_market(const Json& j) {
  if (!j.is_object()) detail::parse_error("market: expected a JSON object");
  if (j.contains("generator")) {
    if (j.at("generator") != "bsm") detail::parse_error("market.generator: only \"bsm\" is supported");
    DiscretizedBsm m = build(parse_bsm_spec(j));
    PriceSystem ps = m.price_system;
    return {std::move(ps), std::move(m)};
  }
  detail::require_keys(j, {"prices", "payoffs", "labels"}, "market");
  if (!j.contains("prices") || !j.contains("payoffs")) {
    detail::parse_error("market: needs \"prices\" and \"payoffs\"");
  }
  Vector prices = detail::vector_of(j.at("prices"), "market.prices");
  Matrix payoffs = detail::matrix_of(j.at("payoffs"), "market.payoffs");
  std::vector<std::string> labels;
  if (j.contains("labels")) {
    if (!j.at("labels").is_array()) detail::parse_error("market.labels: expected an array");
    for (const Json& l : j.at("labels")) {
      if (!l.is_string()) detail::parse_error("market.labels: expected strings");
      labels.push_back(l.get<std::string>());
    }
  }
  try {
    PriceSystem ps(std::move(prices), std::move(payoffs), std::move(labels));
    const auto violations = validate_price_system(ps);
    if (!violations.empty()) detail::parse_error("market: " + violations.front().message);
    return {std::move(ps), std::nullopt};
  } catch (const PricingError& e) {
    if (e.kind() == ErrorKind::kParse) throw;
    detail::parse_error(std::string("market: ") + e.what());
  }
}

struct DerivativeInput {
  Derivative derivative;
  std::optional<OptionKind> kind;
  double strike = 0.0;
};

inline DerivativeInput parse_derivative(const Json& j, const MarketInput& market) {
  if (!j.is_object()) detail::parse_error("derivative: expected a JSON object");
  try {
    if (j.contains("payoffs")) {
      detail::require_keys(j, {"payoffs"}, "derivative");
      Vector d = detail::vector_of(j.at("payoffs"), "derivative.payoffs");
      if (d.size() != market.ps.event_count()) {
        detail::parse_error("derivative.payoffs: length " + std::to_string(d.size()) +
                            " does not match " + std::to_string(market.ps.event_count()) +
                            " events");
      }
      return {Derivative(std::move(d)), std::nullopt, 0.0};
    }
    detail::require_keys(j, {"type", "strike", "asset"}, "derivative");
    if (!j.contains("type") || !j.at("type").is_string()) detail::parse_error("derivative: missing \"type\"");
    const std::string type = j.at("type").get<std::string>();
    OptionKind kind = OptionKind::kCall;
    if (type == "put") {
      kind = OptionKind::kPut;
    } else if (type != "call") {
      detail::parse_error("derivative.type: expected \"call\" or \"put\"");
    }
    const double strike = detail::number_field(j, "strike", "derivative");
    if (strike < 0.0) detail::parse_error("derivative.strike: must be non-negative");
    Index asset = 1;
    if (j.contains("asset")) {
      if (!j.at("asset").is_number_integer()) detail::parse_error("derivative.asset: expected an integer");
      asset = j.at("asset").get<Index>();
    }
    auto f = [kind, strike](double s) { return option_payoff(kind, s, strike); };
    return {arrow_expand(f, market.ps, asset), kind, strike};
  } catch (const PricingError& e) {
    if (e.kind() == ErrorKind::kParse) throw;
    detail::parse_error(std::string("derivative: ") + e.what());
  }
}

inline Json to_json(const Vector& v) {
  Json a = Json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline Json to_json(const MartingaleMeasure& m) {
  return {{"weights", to_json(m.weights)},
          {"residual_inf", m.residual_inf},
          {"min_weight", m.min_weight},
          {"equivalent", m.equivalent()}};
}

inline Json to_json(const ArbitrageCertificate& c) {
  return {{"portfolio", to_json(c.portfolio)},
          {"present_value", c.present_value},
          {"future_values", to_json(c.future_values)}};
}

inline Json to_json(const ArbitrageVerdict& v) {
  if (const auto* m = std::get_if<MartingaleMeasure>(&v)) {
    return {{"verdict", "no-arbitrage"}, {"measure", to_json(*m)}};
  }
  return {{"verdict", "arbitrage"}, {"certificate", to_json(std::get<ArbitrageCertificate>(v))}};
}

inline Json to_json(const ZsgPriceResult& r) {
  Json trace = Json::array();
  for (const ZsgRound& t : r.trace) {
    trace.push_back({{"alpha", t.alpha}, {"lambda", t.lambda}, {"feasible", t.feasible}});
  }
  Json j = {{"method", "zsg"},
            {"bound", to_string(r.sense)},
            {"price", r.price},
            {"alpha", r.alpha_final},
            {"eps", r.eps},
            {"eps_prime", r.eps_prime},
            {"delta", r.delta},
            {"r", r.r},
            {"r_fallback", r.r_fallback},
            {"d_max", r.d_max},
            {"seed", r.seed},
            {"rounds", r.rounds},
            {"iterations", r.iterations_total},
            {"iterations_per_round", r.iterations_per_round},
            {"samples", r.samples_used},
            {"measure_sparsity", r.measure_sparsity},
            {"log_base", r.log_base},
            {"trace", trace}};
  if (r.measure.weights.size() > 0) j["measure"] = to_json(r.measure);
  if (r.halting_k > 0) j["halting_k"] = r.halting_k;
  return j;
}

inline Json to_json(const SimplexSolution& s, const MartingaleMeasure* measure = nullptr) {
  Json basis = Json::array();
  for (Index b : s.basis) basis.push_back(b);
  Json j = {{"method", "simplex"},
            {"bound", to_string(s.sense)},
            {"status", to_string(s.status)},
            {"price", s.objective},
            {"basis", basis},
            {"kappa_basis", s.kappa_basis},
            {"iterations", s.iterations}};
  if (measure) {
    j["measure"] = to_json(*measure);
    j["measure_sparsity"] = (measure->weights.array().abs() > 0.0).count();
  }
  return j;
}

inline Json to_json(const PinvReport& r) {
  return {{"q_plus", to_json(r.q_plus)},
          {"is_least_squares_market", r.is_least_squares_market},
          {"in_closed_set", r.in_closed_set},
          {"is_complete", r.is_complete},
          {"min_entry", r.min_entry},
          {"residual", r.residual},
          {"gamma", r.gamma},
          {"kappa", r.kappa},
          {"rank", r.rank},
          {"distance_to_feasible", r.distance_to_feasible}};
}

inline Json to_json(const AdvantageReport& r) {
  return {{"classical_queries", r.classical_queries},
          {"quantum_queries", r.quantum_queries},
          {"threshold", r.threshold},
          {"advantageous", r.advantageous},
          {"note", r.note}};
}

inline Json to_json(const ScenarioReport& r) {
  auto bound = [](const BoundResult& b) -> Json {
    if (b.status != LpStatus::kOptimal) return to_string(b.status);
    return b.value;
  };
  return {{"option", to_string(r.kind)},
          {"strike", r.strike},
          {"pi", r.spec.pi},
          {"mu", r.spec.mu},
          {"sigma", r.spec.sigma},
          {"k0", r.spec.k0},
          {"analytic_discrete", r.analytic.discrete},
          {"analytic_closed", r.analytic.closed_form},
          {"lp_min", bound(r.interval.min)},
          {"lp_max", bound(r.interval.max)},
          {"d_max", r.d_max},
          {"rho", std::isfinite(r.rho) ? Json(r.rho) : Json(nullptr)},
          {"rho_analytic", std::isfinite(r.rho_analytic) ? Json(r.rho_analytic) : Json(nullptr)}};
}

}  // namespace martprice
