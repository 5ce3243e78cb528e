// hsv: emit R/S/K matrices as JSON and run the exact identity suites.
//
// Exit codes: 0 ok, 1 identity failure, 2 singular parameters, 64 usage error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hsv/boundary.hpp"
#include "hsv/golden.hpp"
#include "hsv/lattice.hpp"
#include "hsv/verify.hpp"

namespace {

using hsv::Scalar;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitFail = 1;
constexpr int kExitSingular = 2;
constexpr int kExitUsage = 64;

Scalar rational(const std::string& flag, const std::string& text) {
  try {
    return Scalar::parse(text);
  } catch (const hsv::InvalidArgument& e) {
    throw hsv::InvalidArgument(flag + ": " + e.what());
  }
}

std::optional<Scalar> rational(const std::string& flag, const std::optional<std::string>& text) {
  if (!text) return std::nullopt;
  return rational(flag, *text);
}

struct RmatArgs {
  std::vector<int> weights;
  std::string lambda = "2";
  std::string h;
  std::string gauge = "stochastic";
};

struct KmatArgs {
  int spin = 1;
  std::string route = "closed";
  std::string h, y, nu;
  std::optional<std::string> t, t_plus, t_minus;
  std::string mu = "1";
  bool check = false;
};

struct GenfunArgs {
  int spin = 1;
  std::string h, y, t, nu, u, v;
};

struct VerifyArgs {
  std::string suite;
  std::optional<std::uint64_t> seed;
  int trials = 10;
  int max_index = 3;
  bool matrix_level = false;
  bool no_timing = false;
};

json cmd_rmat(const RmatArgs& a) {
  if (a.weights.size() != 2) throw hsv::InvalidArgument("--weights takes exactly two values");
  for (int w : a.weights)
    if (w < 1) throw hsv::InvalidArgument("--weights: weights must be >= 1");
  Scalar h = rational("--h", a.h);
  hsv::Weight I = a.weights[0], J = a.weights[1];
  const std::string prefix = "degenerate:";
  if (a.gauge.rfind(prefix, 0) == 0) {
    auto kind = hsv::parse_degenerate_kind(a.gauge.substr(prefix.size()));
    Scalar lam = hsv::degenerate_lambda(kind, I, J, h);
    return hsv::tensor_to_json(hsv::build_s_degenerate(kind, I, J, h), lam, h);
  }
  Scalar lam = rational("--lambda", a.lambda);
  hsv::ModelParams p{h, lam};
  if (a.gauge == "plain") return hsv::tensor_to_json(hsv::build_r(I, J, p), lam, h);
  if (a.gauge == "symmetric") return hsv::tensor_to_json(hsv::build_rbar(I, J, p), lam, h);
  if (a.gauge == "stochastic") return hsv::tensor_to_json(hsv::build_s(I, J, p), lam, h);
  if (a.gauge == "factorized") return hsv::tensor_to_json(hsv::build_s_factorized(I, J, p), lam, h);
  throw hsv::InvalidArgument("--gauge: unknown gauge '" + a.gauge + "'");
}

hsv::BoundaryParams kmat_params(const KmatArgs& a, hsv::KRoute route) {
  auto t = rational("--t", a.t);
  auto tp = rational("--t-plus", a.t_plus);
  auto tm = rational("--t-minus", a.t_minus);
  if (route == hsv::KRoute::upper && tp) throw hsv::InvalidArgument("the upper route forbids --t-plus");
  if (route == hsv::KRoute::lower && tm) throw hsv::InvalidArgument("the lower route forbids --t-minus");
  if (t && (tp || tm)) throw hsv::InvalidArgument("give either --t or --t-plus/--t-minus, not both");
  if (route == hsv::KRoute::closed_form && !t) throw hsv::InvalidArgument("the closed route needs --t");
  Scalar h = rational("--h", a.h), y = rational("--y", a.y), nu = rational("--nu", a.nu), mu = rational("--mu", a.mu);
  hsv::BoundaryParams p;
  if (t) {
    p = hsv::BoundaryParams::from_t(h, *t, nu, y, mu);
  } else {
    p.h = h;
    p.y = y;
    p.nu = nu;
    p.mu = mu;
    p.t_plus = tp.value_or(Scalar(route == hsv::KRoute::lower ? 1 : 0));
    p.t_minus = tm.value_or(Scalar(1));
  }
  if (route == hsv::KRoute::upper) {
    p.t_plus = Scalar(0);
    if (!tm) p.t_minus = Scalar(1);
    p.t.reset();
  }
  if (route == hsv::KRoute::lower) {
    p.t_minus = Scalar(0);
    if (!tp) p.t_plus = Scalar(1);
    p.t.reset();
  }
  p.validate();
  return p;
}

std::pair<json, int> cmd_kmat(const KmatArgs& a) {
  if (a.spin < 1) throw hsv::InvalidArgument("--spin must be >= 1");
  auto route = hsv::parse_k_route(a.route);
  hsv::BoundaryParams p = kmat_params(a, route);
  hsv::KMatrix K = [&] {
    switch (route) {
      case hsv::KRoute::half:
        if (a.spin != 1) throw hsv::InvalidArgument("the half route exists only for --spin 1");
        return hsv::k_half(p, p.y);
      case hsv::KRoute::recurrence: return hsv::k_recurrence(a.spin, p);
      case hsv::KRoute::closed_form: return hsv::k_closed(a.spin, p);
      case hsv::KRoute::upper: return hsv::k_upper(a.spin, p);
      case hsv::KRoute::lower: return hsv::k_lower(a.spin, p);
    }
    throw hsv::InvalidArgument("bad route");
  }();
  json out = hsv::kmatrix_to_json(K, p);
  out["route"] = hsv::to_string(route);
  int code = kExitOk;
  if (a.check) {
    hsv::ResidualAccumulator acc;
    acc.add(hsv::k_recurrence_max_residual(K, p));
    if (route == hsv::KRoute::closed_form) {
      hsv::NMatrix N = hsv::n_closed(a.spin, p);
      acc.add(hsv::n_max_residual(N, p));
      for (int j = 0; j <= a.spin; ++j) acc.add(hsv::n_residual_first_column(N, j, p));
    }
    const Scalar& r = acc.max();
    json check{{"residual", r.str()}, {"status", r.is_zero() ? "pass" : "fail"}};
    if (p.mu == Scalar(1) && route != hsv::KRoute::half) check["stochastic"] = K.is_stochastic();
    if (!r.is_zero() || (check.contains("stochastic") && !check["stochastic"].get<bool>())) code = kExitFail;
    out["check"] = check;
  }
  return {out, code};
}

std::pair<json, int> cmd_genfun(const GenfunArgs& a) {
  if (a.spin < 1) throw hsv::InvalidArgument("--spin must be >= 1");
  Scalar h = rational("--h", a.h), y = rational("--y", a.y), t = rational("--t", a.t), nu = rational("--nu", a.nu);
  Scalar u = rational("--u", a.u), v = rational("--v", a.v);
  auto p = hsv::BoundaryParams::from_t(h, t, nu, y);
  p.validate();
  Scalar value = hsv::genfun_eval(u, v, a.spin, p).value;
  json residuals = json::object();
  bool ok = true;
  for (auto src : {hsv::GenFunSource::closed_form, hsv::GenFunSource::coefficient_table}) {
    hsv::Report r = hsv::genfun_residuals(u, v, a.spin, p, src);
    residuals[hsv::to_string(src)] = {{"residual", r.max_abs_residual.str()}, {"detail", r.note}};
    ok = ok && r.passed();
  }
  json out{{"spin", a.spin},   {"u", u.str()},   {"v", v.str()},     {"h", h.str()},
           {"y", y.str()},     {"t", t.str()},   {"nu", nu.str()},   {"value", value.str()},
           {"residuals", residuals}, {"status", ok ? "pass" : "fail"}};
  return {out, ok ? kExitOk : kExitFail};
}

std::uint64_t default_seed() {
  const char* env = std::getenv("HSV_SEED");
  if (!env || !*env) return 1;
  try {
    std::size_t used = 0;
    unsigned long long v = std::stoull(env, &used);
    if (used != std::string(env).size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw hsv::InvalidArgument(std::string("HSV_SEED is not an unsigned integer: '") + env + "'");
  }
}

std::pair<json, int> cmd_verify(const VerifyArgs& a) {
  if (!hsv::is_suite(a.suite)) throw hsv::InvalidArgument("--suite: unknown suite '" + a.suite + "'");
  if (a.trials < 0) throw hsv::InvalidArgument("--trials must be >= 0");
  if (a.max_index < 0) throw hsv::InvalidArgument("--max-index must be >= 0");
  hsv::SuiteOptions opt;
  opt.max_index = a.max_index;
  opt.matrix_level = a.matrix_level;
  auto res = hsv::run_suite(a.suite, a.seed ? *a.seed : default_seed(), a.trials, opt);
  json out = hsv::suite_to_json(res, !a.no_timing);
  if (res.ok()) return {out, kExitOk};
  bool any_fail = false;
  for (const auto& t : res.trials) any_fail = any_fail || (!t.exploratory && t.status == hsv::Status::fail);
  return {out, any_fail ? kExitFail : kExitSingular};
}

std::pair<json, int> cmd_golden() {
  json draws = json::array();
  bool ok = true;
  for (const auto& g : hsv::golden::fixed_draws()) {
    auto p = hsv::BoundaryParams::from_t(g.h, g.t, g.nu, g.y);
    json spins = json::object();
    for (int J : {1, 2}) {
      hsv::NMatrix expect = J == 1 ? hsv::golden::n_spin1(g.h, g.y, g.t, g.nu) : hsv::golden::n_spin2(g.h, g.y, g.t, g.nu);
      hsv::NMatrix got = hsv::n_closed(J, p);
      int mismatches = 0;
      for (int j = 0; j <= J; ++j)
        for (int l = 0; l <= J; ++l) mismatches += expect(j, l) == got(j, l) ? 0 : 1;
      bool symmetric = got.is_symmetric();
      ok = ok && mismatches == 0 && symmetric;
      spins[std::to_string(J)] = {{"mismatches", mismatches}, {"symmetric", symmetric}};
    }
    draws.push_back({{"h", g.h.str()}, {"y", g.y.str()}, {"t", g.t.str()}, {"nu", g.nu.str()}, {"spins", spins}});
  }
  return {json{{"golden", draws}, {"status", ok ? "pass" : "fail"}}, ok ? kExitOk : kExitFail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact higher-spin stochastic six-vertex matrices and identity checks"};
  // --h is the model parameter, so help is long-form only (inherited by subcommands).
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  std::string output;
  app.add_option("-o,--output", output, "Write JSON here instead of standard output");

  RmatArgs ra;
  auto* rmat = app.add_subcommand("rmat", "Emit an R/S tensor on V_I (x) V_J");
  rmat->add_option("--weights", ra.weights, "Weights I J")->required()->expected(2);
  rmat->add_option("--lambda", ra.lambda, "Spectral parameter (num/den)");
  rmat->add_option("--h", ra.h, "h = q^{1/2} (num/den)")->required();
  rmat->add_option("--gauge", ra.gauge, "plain|symmetric|stochastic|factorized|degenerate:<kind>");

  KmatArgs ka;
  auto* kmat = app.add_subcommand("kmat", "Emit a boundary K-matrix");
  kmat->add_option("--spin", ka.spin, "Spin J")->required();
  kmat->add_option("--route", ka.route, "half|recurrence|closed|upper|lower");
  kmat->add_option("--h", ka.h)->required();
  kmat->add_option("--y", ka.y, "Spectral parameter")->required();
  kmat->add_option("--nu", ka.nu)->required();
  kmat->add_option("--t", ka.t, "t with t_plus = t^2, t_minus = 1");
  kmat->add_option("--t-plus", ka.t_plus);
  kmat->add_option("--t-minus", ka.t_minus);
  kmat->add_option("--mu", ka.mu);
  kmat->add_flag("--check", ka.check, "Append defining-relation residuals");

  GenfunArgs ga;
  auto* genfun = app.add_subcommand("genfun", "Evaluate the N generating function and its functional equations");
  genfun->add_option("--spin", ga.spin)->required();
  for (auto [flag, dst] : {std::pair{"--h", &ga.h}, {"--y", &ga.y}, {"--t", &ga.t}, {"--nu", &ga.nu},
                           {"--u", &ga.u}, {"--v", &ga.v}})
    genfun->add_option(flag, *dst)->required();

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Run an identity suite (default seed from HSV_SEED)");
  verify->add_option("--suite", va.suite, "ybe|reflection|dual|crossing|stochastic|transfer|genfun|phi_identity|qseries|routes")
      ->required();
  verify->add_option("--seed", va.seed);
  verify->add_option("--trials", va.trials);
  verify->add_option("--max-index", va.max_index, "External index bound for phi_identity");
  verify->add_flag("--matrix-level", va.matrix_level, "phi_identity: also check the truncated matrix equation");
  verify->add_flag("--no-timing", va.no_timing, "Omit per-trial timings (byte-stable output)");

  auto* golden = app.add_subcommand("golden", "Compare the closed-form N against the tabulated weight-1 and weight-2 matrices");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    std::pair<json, int> result;
    if (*rmat) result = {cmd_rmat(ra), kExitOk};
    else if (*kmat) result = cmd_kmat(ka);
    else if (*genfun) result = cmd_genfun(ga);
    else if (*verify) result = cmd_verify(va);
    else if (*golden) result = cmd_golden();
    std::string text = result.first.dump(2) + "\n";
    if (output.empty()) {
      std::cout << text;
    } else {
      std::ofstream f(output);
      if (!f) throw hsv::InvalidArgument("cannot open output file '" + output + "'");
      f << text;
    }
    return result.second;
  } catch (const hsv::InvalidArgument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const hsv::Singular& e) {
    std::cerr << "singular: " << e.what() << "\n";
    return kExitSingular;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFail;
  }
}
