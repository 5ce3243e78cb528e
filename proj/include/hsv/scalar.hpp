#pragma once

#include <gmpxx.h>

#include <compare>
#include <concepts>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>

#include "hsv/errors.hpp"

namespace hsv {

/// Exact rational number, always in lowest terms with a positive denominator.
///
/// Thin value wrapper over GMP's mpq_class. Division by zero throws
/// DivisionByZero instead of trapping.
class Scalar {
 public:
  Scalar() = default;
  template <std::integral I>
  Scalar(I v) : v_(static_cast<long>(v)) {}  // NOLINT(google-explicit-constructor)
  Scalar(long num, long den) {
    if (den == 0) throw DivisionByZero("rational with zero denominator");
    v_ = mpq_class(num, den);
    v_.canonicalize();
  }
  explicit Scalar(mpq_class v) : v_(std::move(v)) { v_.canonicalize(); }

  /// Parses "num/den" or a plain integer literal ("-3/8", "7", "+2/4").
  static Scalar parse(std::string_view text) {
    std::string s(text);
    if (s.empty()) throw InvalidArgument("empty rational literal");
    auto valid_int = [](std::string_view t) {
      if (!t.empty() && (t.front() == '+' || t.front() == '-')) t.remove_prefix(1);
      if (t.empty()) return false;
      for (char ch : t)
        if (ch < '0' || ch > '9') return false;
      return true;
    };
    auto strip_plus = [](std::string t) {
      if (!t.empty() && t.front() == '+') t.erase(0, 1);
      return t;
    };
    auto slash = s.find('/');
    mpz_class num, den(1);
    if (slash == std::string::npos) {
      if (!valid_int(s)) throw InvalidArgument("malformed rational: '" + s + "'");
      num = mpz_class(strip_plus(s));
    } else {
      std::string a = s.substr(0, slash), b = s.substr(slash + 1);
      if (!valid_int(a) || !valid_int(b) || b.front() == '-' || b.front() == '+')
        throw InvalidArgument("malformed rational: '" + s + "'");
      num = mpz_class(strip_plus(a));
      den = mpz_class(b);
      if (den == 0) throw InvalidArgument("zero denominator in rational: '" + s + "'");
    }
    mpq_class q(num, den);
    q.canonicalize();
    return Scalar(std::move(q));
  }

  /// Canonical text form: "num/den", or just "num" when the denominator is 1.
  std::string str() const {
    if (v_.get_den() == 1) return v_.get_num().get_str();
    return v_.get_num().get_str() + "/" + v_.get_den().get_str();
  }

  bool is_zero() const { return sgn(v_) == 0; }
  int sign() const { return sgn(v_); }
  bool is_integer() const { return v_.get_den() == 1; }
  const mpz_class& num() const { return v_.get_num(); }
  const mpz_class& den() const { return v_.get_den(); }
  const mpq_class& raw() const { return v_; }

  /// Number of bits in numerator plus denominator; a cheap size measure.
  std::size_t bits() const {
    return mpz_sizeinbase(v_.get_num_mpz_t(), 2) + mpz_sizeinbase(v_.get_den_mpz_t(), 2);
  }

  Scalar abs() const { return Scalar(mpq_class(::abs(v_))); }
  Scalar inverse() const {
    if (is_zero()) throw DivisionByZero("inverse of zero");
    mpq_class r;
    mpq_inv(r.get_mpq_t(), v_.get_mpq_t());
    return Scalar(std::move(r));
  }

  Scalar& operator+=(const Scalar& o) {
    v_ += o.v_;
    return *this;
  }
  Scalar& operator-=(const Scalar& o) {
    v_ -= o.v_;
    return *this;
  }
  Scalar& operator*=(const Scalar& o) {
    v_ *= o.v_;
    return *this;
  }
  Scalar& operator/=(const Scalar& o) {
    if (o.is_zero()) throw DivisionByZero("division by zero");
    v_ /= o.v_;
    return *this;
  }

  friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
  friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
  friend Scalar operator*(Scalar a, const Scalar& b) { return a *= b; }
  friend Scalar operator/(Scalar a, const Scalar& b) { return a /= b; }
  friend Scalar operator-(const Scalar& a) { return Scalar(mpq_class(-a.v_)); }

  friend bool operator==(const Scalar& a, const Scalar& b) { return cmp(a.v_, b.v_) == 0; }
  friend std::strong_ordering operator<=>(const Scalar& a, const Scalar& b) {
    int c = cmp(a.v_, b.v_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

  friend std::ostream& operator<<(std::ostream& os, const Scalar& s) { return os << s.str(); }

 private:
  mpq_class v_;
};

inline bool is_zero(const Scalar& s) { return s.is_zero(); }

/// Integer power, negative exponents allowed (throws on 0^negative).
template <class T>
T ipow(const T& base, int e) {
  if (e < 0) return T(1) / ipow(base, -e);
  T result(1), b = base;
  while (e > 0) {
    if (e & 1) result *= b;
    e >>= 1;
    if (e) b *= b;
  }
  return result;
}

inline Scalar max_abs(const Scalar& a, const Scalar& b) {
  Scalar x = a.abs(), y = b.abs();
  return x < y ? y : x;
}

}  // namespace hsv
