// Acceptance gate: every criterion at exact-zero tolerance, each under its own
// wall-clock limit. Prints one PASS/FAIL line per criterion; exit status is the
// number of failures (0 when all pass). Seed: HSV_SEED, default 1.

#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>

#include "hsv/golden.hpp"
#include "hsv/verify.hpp"

namespace {

using hsv::Scalar;

struct Outcome {
  bool ok = true;
  int checks = 0;
  int exploratory = 0;
  std::string detail;
};

void absorb(Outcome& o, const hsv::SuiteResult& r) {
  for (const auto& t : r.trials) {
    if (t.exploratory) {
      ++o.exploratory;
      continue;
    }
    ++o.checks;
    if (!t.passed()) {
      o.ok = false;
      if (o.detail.empty()) o.detail = t.identity + " " + hsv::to_string(t.status) + " residual " + t.max_abs_residual.str();
    }
  }
}

void absorb(Outcome& o, const hsv::Report& r) {
  ++o.checks;
  if (!r.passed()) {
    o.ok = false;
    if (o.detail.empty()) o.detail = r.identity + " residual " + r.max_abs_residual.str();
  }
}

std::uint64_t seed_from_env() {
  const char* env = std::getenv("HSV_SEED");
  return env && *env ? std::strtoull(env, nullptr, 10) : 1;
}

// Resamples singular draws like run_suite does, so a criterion never silently skips a draw.
template <class F>
hsv::Report with_resampling(std::uint64_t seed, F&& check) {
  for (std::uint64_t attempt = 0; attempt < 100; ++attempt) {
    hsv::Sampler s(hsv::derive_seed(seed, attempt));
    try {
      return check(s);
    } catch (const hsv::Singular&) {
    }
  }
  hsv::Report r;
  r.identity = "resample cap";
  r.status = hsv::Status::singular;
  return r;
}

}  // namespace

int main() {
  const std::uint64_t seed = seed_from_env();
  int failures = 0;

  auto criterion = [&](int id, const char* name, double limit_ms, const std::function<Outcome()>& body) {
    hsv::Stopwatch sw;
    Outcome o;
    try {
      o = body();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = std::string("exception: ") + e.what();
    }
    double ms = sw.ms();
    bool in_time = ms <= limit_ms;
    bool pass = o.ok && in_time && o.checks > 0;
    failures += pass ? 0 : 1;
    std::printf("%s  %2d  %-44s %5d checks  %9.1f ms (limit %.0f ms)", pass ? "PASS" : "FAIL", id, name, o.checks, ms,
                limit_ms);
    if (o.exploratory > 0) std::printf("  [%d exploratory]", o.exploratory);
    if (!in_time) std::printf("  over time limit");
    if (!o.detail.empty()) std::printf("  %s", o.detail.c_str());
    std::printf("\n");
    std::fflush(stdout);
  };

  std::printf("acceptance seed %llu\n", static_cast<unsigned long long>(seed));

  criterion(1, "golden N matrices, spin 1 and 2", 1000, [] {
    Outcome o;
    for (const auto& g : hsv::golden::fixed_draws()) {
      auto p = hsv::BoundaryParams::from_t(g.h, g.t, g.nu, g.y);
      for (int J : {1, 2}) {
        hsv::NMatrix expect = J == 1 ? hsv::golden::n_spin1(g.h, g.y, g.t, g.nu) : hsv::golden::n_spin2(g.h, g.y, g.t, g.nu);
        ++o.checks;
        if (!(hsv::n_closed(J, p) == expect)) {
          o.ok = false;
          o.detail = "mismatch at spin " + std::to_string(J);
        }
      }
    }
    return o;
  });

  criterion(2, "K route equality, spin 1..4", 30000, [&] {
    Outcome o;
    absorb(o, hsv::run_suite("routes", seed, 40));  // spins cycle 1..4: 10 draws each
    return o;
  });

  criterion(3, "Yang-Baxter, all weights in {1,2,3}^3", 120000, [&] {
    Outcome o;
    absorb(o, hsv::run_suite("ybe", seed, 27 * 5));
    return o;
  });

  criterion(4, "reflection, I=1 J<=3 and I=J<=2", 120000, [&] {
    Outcome o;
    // 16 configurations (seed, four routes x J<=3, (2,2) twice, (2,3) exploratory), 10 draws each.
    absorb(o, hsv::run_suite("reflection", seed, 16 * 10));
    return o;
  });

  criterion(5, "crossing and unitarity, weights <= 3", 60000, [&] {
    Outcome o;
    absorb(o, hsv::run_suite("crossing", seed, 9 * 10));
    return o;
  });

  criterion(6, "stochasticity of S and of every unit-mu K", 60000, [&] {
    Outcome o;
    absorb(o, hsv::run_suite("stochastic", seed, 13 * 10));
    const hsv::KRoute routes[] = {hsv::KRoute::recurrence, hsv::KRoute::closed_form, hsv::KRoute::upper,
                                  hsv::KRoute::lower};
    std::uint64_t k = 0;
    for (int J = 1; J <= 4; ++J)
      for (hsv::KRoute r : routes)
        for (int trial = 0; trial < 5; ++trial)
          absorb(o, with_resampling(hsv::derive_seed(seed ^ 0x5a5a, k++), [&](hsv::Sampler& s) {
                   auto p = hsv::BoundaryParams::from_t(s.generic(), s.generic(), s.generic(), s.generic());
                   if (r == hsv::KRoute::recurrence) {
                     p.t.reset();
                     p.t_plus = s.rational();
                     p.t_minus = s.rational();
                   }
                   return hsv::check_stochastic_k(J, p, r);
                 }));
    return o;
  });

  criterion(7, "double-row transfer matrices commute", 120000, [&] {
    Outcome o;
    absorb(o, hsv::run_suite("transfer", seed, 6 * 5));
    return o;
  });

  criterion(8, "generating function relations, spin 1..3", 60000, [&] {
    Outcome o;
    absorb(o, hsv::run_suite("genfun", seed, 3 * 10));
    return o;
  });

  criterion(9, "quartic Phi identity, indices <= 3", 60000, [&] {
    Outcome o;
    hsv::SuiteOptions opt;
    opt.max_index = 3;
    absorb(o, hsv::run_suite("phi_identity", seed, 5, opt));
    return o;
  });

  criterion(10, "q-series oracle identities", 30000, [&] {
    Outcome o;
    absorb(o, hsv::run_suite("qseries", seed, 6 * 50));
    return o;
  });

  std::printf("%s: %d of 10 criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures;
}
