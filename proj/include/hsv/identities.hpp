#pragma once

// Terminating basic hypergeometric identities, checked to exact zero.
//
// Each check evaluates both sides independently by direct summation and
// reports the exact residual LHS - RHS.

#include <array>
#include <string>
#include <string_view>

#include "hsv/qseries.hpp"
#include "hsv/report.hpp"

namespace hsv {

enum class QSeriesIdentity {
  qvandermonde,        // 2phi1(q^-n, a; c; q, q) = a^n (c/a;q)_n / (c;q)_n
  sears,               // balanced terminating 4phi3 transformation
  phi32_terminating,   // terminating 3phi2 transformation
  contiguous_2phi1,    // Heine-type contiguous relation, a = q^-n
  contiguous_4phi3_A,  // (1-a)(d-e) phi(a+,d+,e+) - (1-d)(a-e) phi(e+) + (1-e)(a-d) phi(d+) = 0
  contiguous_4phi3_B,  // the (d+, e+, a-) relation
};

inline constexpr std::array<QSeriesIdentity, 6> kAllQSeriesIdentities = {
    QSeriesIdentity::qvandermonde,       QSeriesIdentity::sears,
    QSeriesIdentity::phi32_terminating,  QSeriesIdentity::contiguous_2phi1,
    QSeriesIdentity::contiguous_4phi3_A, QSeriesIdentity::contiguous_4phi3_B,
};

inline std::string to_string(QSeriesIdentity k) {
  switch (k) {
    case QSeriesIdentity::qvandermonde: return "qvandermonde";
    case QSeriesIdentity::sears: return "sears";
    case QSeriesIdentity::phi32_terminating: return "phi32_terminating";
    case QSeriesIdentity::contiguous_2phi1: return "contiguous_2phi1";
    case QSeriesIdentity::contiguous_4phi3_A: return "contiguous_4phi3_A";
    case QSeriesIdentity::contiguous_4phi3_B: return "contiguous_4phi3_B";
  }
  return "?";
}

inline QSeriesIdentity parse_qseries_identity(std::string_view name) {
  for (auto k : kAllQSeriesIdentities)
    if (to_string(k) == name) return k;
  throw InvalidArgument("unknown q-series identity '" + std::string(name) + "'");
}

/// Upper parameter f fixed by the side condition of the identity.
///   sears:        def = abc q^{1-n}  (the 4phi3 is balanced)
///   contiguous_*: def = abc q^{-n}   (the shifted series are balanced)
inline Scalar balanced_f(QSeriesIdentity kind, const Draw& d) {
  const Scalar& q = d.at("q");
  int n = d.integer("n");
  int shift = kind == QSeriesIdentity::sears ? 1 - n : -n;
  return d.at("a") * d.at("b") * d.at("c") * ipow(q, shift) / (d.at("d") * d.at("e"));
}

namespace detail {

inline Scalar qvandermonde_residual(const Draw& d) {
  const Scalar &q = d.at("q"), &a = d.at("a"), &c = d.at("c");
  int n = d.integer("n");
  Scalar lhs = phi_terminating<Scalar>({ipow(q, -n), a}, {c}, q, q, n);
  Scalar rhs = ipow(a, n) * qpoch(c / a, q, n) / qpoch(c, q, n);
  return lhs - rhs;
}

inline Scalar sears_residual(const Draw& d) {
  const Scalar &q = d.at("q"), &a = d.at("a"), &b = d.at("b"), &c = d.at("c"), &dd = d.at("d"),
               &e = d.at("e");
  int n = d.integer("n");
  Scalar f = balanced_f(QSeriesIdentity::sears, d);
  Scalar qn = ipow(q, -n);
  Scalar lhs = phi_terminating<Scalar>({qn, a, b, c}, {dd, e, f}, q, q, n);
  Scalar ef = e * f;
  Scalar pre = qpoch<Scalar>({a, ef / (a * b), ef / (a * c)}, q, n) /
               qpoch<Scalar>({e, f, ef / (a * b * c)}, q, n);
  Scalar rhs = pre * phi_terminating<Scalar>({qn, e / a, f / a, ef / (a * b * c)},
                                             {ef / (a * b), ef / (a * c), ipow(q, 1 - n) / a}, q, q, n);
  return lhs - rhs;
}

inline Scalar phi32_residual(const Draw& d) {
  const Scalar &q = d.at("q"), &b = d.at("b"), &c = d.at("c"), &dd = d.at("d"), &e = d.at("e");
  int n = d.integer("n");
  Scalar qn = ipow(q, -n);
  Scalar lhs = phi_terminating<Scalar>({qn, b, c}, {dd, e}, q, dd * e * ipow(q, n) / (b * c), n);
  Scalar rhs = qpoch(e / c, q, n) / qpoch(e, q, n) *
               phi_terminating<Scalar>({qn, c, dd / b}, {dd, c * ipow(q, 1 - n) / e}, q, q, n);
  return lhs - rhs;
}

inline Scalar contiguous_2phi1_residual(const Draw& d) {
  const Scalar &q = d.at("q"), &b = d.at("b"), &c = d.at("c"), &z = d.at("z");
  int n = d.integer("n");
  Scalar a = ipow(q, -n);
  // a q^{+1} = q^{-(n-1)} terminates at n-1, a q^{-1} at n+1.
  auto series = [&](const Scalar& aa, const Scalar& cc, int kmax) {
    return phi_terminating<Scalar>({aa, b}, {cc}, q, z, kmax);
  };
  Scalar up = n == 0 ? Scalar(1) : series(a * q, c * q, n - 1);
  Scalar down = series(a / q, c / q, n + 1);
  Scalar mid = series(a, c, n);
  return z * (Scalar(1) - a) * (b - c) * up + (Scalar(1) - c) * (q - c) * down +
         (Scalar(1) - c) * (c - q + (a - b) * z) * mid;
}

inline Scalar contiguous_4phi3_residual(const Draw& d, bool variant_b) {
  const Scalar &q = d.at("q"), &a = d.at("a"), &b = d.at("b"), &c = d.at("c"), &dd = d.at("d"),
               &e = d.at("e");
  int n = d.integer("n");
  Scalar f = balanced_f(variant_b ? QSeriesIdentity::contiguous_4phi3_B : QSeriesIdentity::contiguous_4phi3_A, d);
  Scalar qn = ipow(q, -n);
  auto phi = [&](const Scalar& aa, const Scalar& d_, const Scalar& e_) {
    return phi_terminating<Scalar>({qn, aa, b, c}, {d_, e_, f}, q, q, n);
  };
  const Scalar one(1);
  if (!variant_b) {
    return (one - a) * (dd - e) * phi(a * q, dd * q, e * q) - (one - dd) * (a - e) * phi(a, dd, e * q) +
           (one - e) * (a - dd) * phi(a, dd * q, e);
  }
  Scalar qpn = ipow(q, n);
  return e * (one - e) * (b - dd) * (c - dd) * (one - dd * qpn) * phi(a, dd * q, e) -
         dd * (one - dd) * (b - e) * (c - e) * (one - e * qpn) * phi(a, dd, e * q) +
         (dd - e) * (one - dd) * (one - e) * (b * c - dd * e * qpn) * phi(a / q, dd, e);
}

}  // namespace detail

/// Exact residual of one q-series identity at a parameter draw.
/// Throws SingularDraw when a denominator vanishes for this draw.
inline Report check_qseries_identity(QSeriesIdentity kind, const Draw& draw) {
  Stopwatch sw;
  Scalar residual;
  try {
    switch (kind) {
      case QSeriesIdentity::qvandermonde: residual = detail::qvandermonde_residual(draw); break;
      case QSeriesIdentity::sears: residual = detail::sears_residual(draw); break;
      case QSeriesIdentity::phi32_terminating: residual = detail::phi32_residual(draw); break;
      case QSeriesIdentity::contiguous_2phi1: residual = detail::contiguous_2phi1_residual(draw); break;
      case QSeriesIdentity::contiguous_4phi3_A: residual = detail::contiguous_4phi3_residual(draw, false); break;
      case QSeriesIdentity::contiguous_4phi3_B: residual = detail::contiguous_4phi3_residual(draw, true); break;
    }
  } catch (const Singular& e) {
    throw SingularDraw(to_string(kind) + ": " + e.what());
  }
  return make_report(to_string(kind), draw, residual, sw.ms());
}

/// Random draw for `kind`: nome q generic, n in [0, max_n], the rest uniform small rationals.
inline Draw sample_qseries_draw(QSeriesIdentity kind, Sampler& s, int max_n = 4) {
  Draw d;
  d.set("q", s.generic());
  d.set("n", Scalar(s.integer(0, max_n)));
  for (const char* name : {"a", "b", "c", "d", "e", "z"}) d.set(name, s.generic());
  (void)kind;
  return d;
}

}  // namespace hsv
