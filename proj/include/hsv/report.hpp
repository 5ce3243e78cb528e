#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "hsv/errors.hpp"
#include "hsv/scalar.hpp"

namespace hsv {

/// A reproducible assignment of named rational parameters.
struct Draw {
  std::uint64_t seed = 0;
  std::map<std::string, Scalar> params;
  int rejections = 0;
  std::vector<std::string> rejection_reasons;

  const Scalar& at(const std::string& name) const {
    auto it = params.find(name);
    if (it == params.end()) throw InvalidArgument("draw has no parameter '" + name + "'");
    return it->second;
  }
  int integer(const std::string& name) const {
    const Scalar& s = at(name);
    if (!s.is_integer() || !s.num().fits_sint_p())
      throw InvalidArgument("parameter '" + name + "' is not a small integer");
    return static_cast<int>(s.num().get_si());
  }
  Draw& set(const std::string& name, Scalar value) {
    params[name] = std::move(value);
    return *this;
  }
};

enum class Status { pass, fail, singular };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::pass: return "pass";
    case Status::fail: return "fail";
    case Status::singular: return "singular";
  }
  return "?";
}

/// Outcome of one identity check. status == pass iff max_abs_residual == 0.
struct Report {
  std::string identity;
  Draw draw;
  Scalar max_abs_residual;
  Status status = Status::pass;
  double ms = 0.0;
  bool exploratory = false;
  std::string note;

  bool passed() const { return status == Status::pass; }
};

/// Folds residuals into a running exact maximum of absolute values.
class ResidualAccumulator {
 public:
  void add(const Scalar& r) {
    Scalar a = r.abs();
    if (max_ < a) max_ = a;
  }
  void add_difference(const Scalar& lhs, const Scalar& rhs) { add(lhs - rhs); }
  const Scalar& max() const { return max_; }

 private:
  Scalar max_;
};

inline Report make_report(std::string identity, Draw draw, const Scalar& residual, double ms = 0.0) {
  Report r;
  r.identity = std::move(identity);
  r.draw = std::move(draw);
  r.max_abs_residual = residual.abs();
  r.status = r.max_abs_residual.is_zero() ? Status::pass : Status::fail;
  r.ms = ms;
  return r;
}

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

/// Seeded source of small random rationals: numerator and denominator uniform
/// in [1, bound], random sign.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed, int bound = 30) : rng_(seed), bound_(bound) {}

  Scalar rational(bool allow_negative = true) {
    std::uniform_int_distribution<long> pick(1, bound_);
    long n = pick(rng_), d = pick(rng_);
    if (allow_negative && std::uniform_int_distribution<int>(0, 1)(rng_)) n = -n;
    return Scalar(n, d);
  }
  /// A rational outside {0, 1, -1}; used for q-like nomes and h.
  Scalar generic(bool allow_negative = true) {
    for (;;) {
      Scalar s = rational(allow_negative);
      if (s != Scalar(1) && s != Scalar(-1)) return s;
    }
  }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
  int bound_;
};

/// Per-trial seed derivation (splitmix64 finalizer over seed and index).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace hsv
