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


// Command-line front end: price, arbitrage, experiment, advantage.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "martprice.hpp"

namespace mp = martprice;

namespace {

struct PriceArgs {
  std::string market;
  std::string derivative;
  std::string method = "simplex";
  std::string bound = "both";
  double eps = 0.01;
  double delta = 0.1;
  std::uint64_t seed = 0;
  bool relative = false;
  double iteration_scale = 1.0;
};

struct ExperimentArgs {
  std::string scan;
  std::string grid;
  std::string spec;
  std::string option = "call";
  double strike = 10.0;
  std::optional<double> eta;
  std::string solver = "simplex";
  double eps = 0.01;
  double iteration_scale = 1.0;
  std::uint64_t seed = 0;
  std::string out = "-";
};

struct AdvantageArgs {
  double n = 0, k = 0, eps = 0, rho = 0, xi_l0 = 0;
};

void emit(const mp::Json& j) { std::cout << j.dump(2) << "\n"; }

mp::Json price_one(const PriceArgs& a, const mp::PriceSystem& ps, const mp::Derivative& d,
                   mp::Sense sense, std::uint64_t seed) {
  if (a.method == "simplex") {
    const mp::SimplexSolution sol = mp::solve(ps, d, sense);
    if (sol.status == mp::LpStatus::kInfeasible) {
      mp::fail(mp::ErrorKind::kInfeasible, "pricing LP is infeasible");
    }
    if (!sol.optimal()) {
      mp::fail(mp::ErrorKind::kSolver, std::string("simplex ended with status ") + mp::to_string(sol.status));
    }
    const mp::MartingaleMeasure q = mp::extract_measure(sol, ps);
    return mp::to_json(sol, &q);
  }
  mp::ZsgOptions zo;
  zo.iteration_scale = a.iteration_scale;
  const mp::ZsgPriceResult r = a.relative ? mp::price_relative(ps, d, sense, a.eps, seed, zo)
                                          : mp::price_absolute(ps, d, sense, a.eps, a.delta, seed, zo);
  return mp::to_json(r);
}

int cmd_price(const PriceArgs& a) {
  const mp::MarketInput market = mp::parse_market(mp::load_json(a.market));
  const mp::DerivativeInput din = mp::parse_derivative(mp::load_json(a.derivative), market);
  const mp::PriceSystem& ps = market.ps;

  if (a.method == "pinv") {
    try {
      const mp::PinvPrice p = mp::pinv_price(ps, din.derivative);
      emit({{"method", "pinv"}, {"price", p.price}, {"report", mp::to_json(p.report)}});
      return 0;
    } catch (const mp::NotLeastSquaresError& e) {
      emit({{"method", "pinv"}, {"error", e.what()}, {"report", mp::to_json(e.report())}});
      std::cerr << "error: " << e.what() << "\n";
      return mp::exit_code(e.kind());
    }
  }

  const mp::ArbitrageVerdict verdict = mp::detect_arbitrage(ps);
  if (mp::has_arbitrage(verdict)) {
    emit(mp::to_json(verdict));
    std::cerr << "error: market admits arbitrage; no pricing measure exists\n";
    return mp::exit_code(mp::ErrorKind::kInfeasible);
  }

  const mp::CounterRng root(a.seed);
  if (a.bound == "both") {
    const mp::Json lo = price_one(a, ps, din.derivative, mp::Sense::kMin, root.split(0)());
    const mp::Json hi = price_one(a, ps, din.derivative, mp::Sense::kMax, root.split(1)());
    emit({{"method", a.method},
          {"bound", "both"},
          {"min", lo.at("price")},
          {"max", hi.at("price")},
          {"results", {{"min", lo}, {"max", hi}}}});
  } else {
    emit(price_one(a, ps, din.derivative, a.bound == "min" ? mp::Sense::kMin : mp::Sense::kMax, a.seed));
  }
  return 0;
}

int cmd_arbitrage(const std::string& market_arg) {
  const mp::MarketInput market = mp::parse_market(mp::load_json(market_arg));
  emit(mp::to_json(mp::detect_arbitrage(market.ps)));
  return 0;
}

int cmd_experiment(const ExperimentArgs& a) {
  mp::ExperimentConfig cfg;
  if (!a.spec.empty()) {
    mp::Json j = mp::load_json(a.spec);
    if (!j.contains("generator")) j["generator"] = "bsm";
    cfg.base = mp::parse_bsm_spec(j);
  }
  cfg.kind = a.option == "put" ? mp::OptionKind::kPut : mp::OptionKind::kCall;
  cfg.strike = a.strike;
  cfg.eta = a.eta;
  cfg.solver = a.solver == "zsg" ? mp::ExperimentSolver::kZsg : mp::ExperimentSolver::kSimplex;
  cfg.zsg_eps = a.eps;
  cfg.zsg_iteration_scale = a.iteration_scale;
  cfg.seed = a.seed;
  const auto rows = mp::run_experiment(cfg, mp::parse_scan_var(a.scan), mp::parse_grid(a.grid));
  if (a.out == "-") {
    mp::write_csv(std::cout, rows);
  } else {
    std::ofstream out(a.out, std::ios::binary);
    if (!out) mp::fail(mp::ErrorKind::kInvalidInput, "cannot write " + a.out);
    mp::write_csv(out, rows);
  }
  return 0;
}

int cmd_advantage(const AdvantageArgs& a) {
  emit(mp::to_json(mp::quantum_advantage_report(a.n, a.k, a.eps, a.rho, a.xi_l0)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Arbitrage-free derivative pricing in single-period markets"};
  app.require_subcommand(1);

  PriceArgs pa;
  auto* price = app.add_subcommand("price", "Price a derivative (interval or single bound)");
  price->add_option("--market", pa.market, "Market JSON file or inline JSON")->required();
  price->add_option("--derivative", pa.derivative, "Derivative JSON file or inline JSON")->required();
  price->add_option("--method", pa.method)->check(CLI::IsMember({"zsg", "simplex", "pinv"}));
  price->add_option("--bound", pa.bound)->check(CLI::IsMember({"min", "max", "both"}));
  price->add_option("--eps", pa.eps, "Precision for the game solver")->check(CLI::Range(0.0, 1.0));
  price->add_option("--delta", pa.delta, "Failure probability for the game solver")->check(CLI::Range(0.0, 1.0));
  price->add_option("--seed", pa.seed);
  price->add_flag("--relative", pa.relative, "Relative-error doubling scheme (zsg)");
  price->add_option("--iteration-scale", pa.iteration_scale, "Multiplier on the game iteration count")
      ->check(CLI::PositiveNumber);

  std::string arb_market;
  auto* arb = app.add_subcommand("arbitrage", "Find a martingale measure or an arbitrage portfolio");
  arb->add_option("--market", arb_market, "Market JSON file or inline JSON")->required();

  ExperimentArgs ea;
  auto* exp = app.add_subcommand("experiment", "Parameter scan over the discretized BSM market (CSV)");
  exp->add_option("--scan", ea.scan)->required()->check(CLI::IsMember({"eta", "mu", "sigma", "strike", "spot"}));
  exp->add_option("--grid", ea.grid, "a:b[:n] (log), a..b[:n] (linear) or x,y,z")->required();
  exp->add_option("--spec", ea.spec, "Base BSM parameters as JSON");
  exp->add_option("--option", ea.option)->check(CLI::IsMember({"call", "put"}));
  exp->add_option("--strike", ea.strike);
  exp->add_option("--eta", ea.eta, "Regularization parameter for non-eta scans");
  exp->add_option("--solver", ea.solver)->check(CLI::IsMember({"simplex", "zsg"}));
  exp->add_option("--eps", ea.eps)->check(CLI::Range(0.0, 1.0));
  exp->add_option("--iteration-scale", ea.iteration_scale)->check(CLI::PositiveNumber);
  exp->add_option("--seed", ea.seed);
  exp->add_option("--out", ea.out, "CSV output path, '-' for stdout");

  AdvantageArgs aa;
  auto* adv = app.add_subcommand("advantage", "Query-count comparison for the game solver");
  adv->add_option("--n", aa.n)->required();
  adv->add_option("--k", aa.k)->required();
  adv->add_option("--eps", aa.eps)->required();
  adv->add_option("--rho", aa.rho)->required();
  adv->add_option("--xi-l0", aa.xi_l0)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : mp::exit_code(mp::ErrorKind::kParse);
  }

  try {
    if (*price) return cmd_price(pa);
    if (*arb) return cmd_arbitrage(arb_market);
    if (*exp) return cmd_experiment(ea);
    if (*adv) return cmd_advantage(aa);
  } catch (const mp::PricingError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return mp::exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return mp::exit_code(mp::ErrorKind::kSolver);
  }
  return 0;
}
