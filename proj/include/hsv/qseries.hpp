#pragma once

// Exact q-Pochhammer symbols, q-binomials, terminating basic hypergeometric
// series and the stochastic weight Phi_q(gamma|beta; x, y).
//
// Everything is generic over the scalar field T (hsv::Scalar or hsv::Laurent).

#include <string>
#include <vector>

#include "hsv/errors.hpp"
#include "hsv/scalar.hpp"

namespace hsv {

/// [z] = z - 1/z.
template <class T>
T bracket(const T& z) {
  return z - T(1) / z;
}

/// (a; q)_n = prod_{i=0}^{n-1} (1 - a q^i).
template <class T>
T qpoch(const T& a, const T& q, int n) {
  if (n < 0) throw InvalidArgument("qpoch: negative length");
  T result(1), aqi = a;
  for (int i = 0; i < n; ++i) {
    result *= T(1) - aqi;
    aqi *= q;
  }
  return result;
}

/// Product of several Pochhammer symbols sharing base and length.
template <class T>
T qpoch(const std::vector<T>& as, const T& q, int n) {
  T result(1);
  for (const auto& a : as) result *= qpoch(a, q, n);
  return result;
}

/// Gaussian binomial [n, m]_q; zero outside 0 <= m <= n.
template <class T>
T qbinom(int n, int m, const T& q) {
  if (n < 0) throw InvalidArgument("qbinom: negative n");
  if (m < 0 || m > n) return T(0);
  T den = qpoch(q, q, m) * qpoch(q, q, n - m);
  if (is_zero(den)) throw VanishingDenominator("qbinom: (q;q)_m vanishes");
  return qpoch(q, q, n) / den;
}

template <class T>
struct PochSpec {
  T base;
  T nome;
  int length = 0;
};

/// Terminating r+1 phi r series, summed for k = 0..kmax.
template <class T>
struct PhiSeriesSpec {
  std::vector<T> numerators;
  std::vector<T> denominators;
  T nome;
  T argument;
  int kmax = 0;
};

/// sum_{k=0}^{kmax} (a_1..a_{r+1}; q)_k / (q, b_1..b_r; q)_k x^k.
///
/// Denominators are checked over the whole range before anything is summed.
template <class T>
T phi_terminating(const PhiSeriesSpec<T>& spec) {
  if (spec.kmax < 0) throw InvalidArgument("phi_terminating: negative kmax");
  const T& q = spec.nome;
  std::vector<T> den(spec.kmax + 1, T(1));
  for (int k = 1; k <= spec.kmax; ++k) {
    T factor = T(1) - ipow(q, k);
    for (const auto& b : spec.denominators) factor *= T(1) - b * ipow(q, k - 1);
    if (is_zero(factor))
      throw VanishingDenominator("phi_terminating: denominator vanishes at k=" + std::to_string(k));
    den[k] = den[k - 1] * factor;
  }
  T sum(0), num(1), xk(1);
  for (int k = 0; k <= spec.kmax; ++k) {
    if (k > 0) {
      for (const auto& a : spec.numerators) num *= T(1) - a * ipow(q, k - 1);
      xk *= spec.argument;
    }
    sum += num / den[k] * xk;
  }
  return sum;
}

template <class T>
T phi_terminating(std::vector<T> numerators, std::vector<T> denominators, const T& q, const T& x,
                  int kmax) {
  return phi_terminating(PhiSeriesSpec<T>{std::move(numerators), std::move(denominators), q, x, kmax});
}

/// Phi_q(gamma|beta; x, y) = (y/x)^gamma (x;q)_gamma (y/x;q)_{beta-gamma} / (y;q)_beta [beta, gamma]_q.
/// Zero unless 0 <= gamma <= beta.
template <class T>
T phi_weight(int gamma, int beta, const T& x, const T& y, const T& q) {
  if (beta < 0) throw InvalidArgument("phi_weight: negative beta");
  if (gamma < 0 || gamma > beta) return T(0);
  if (is_zero(x)) throw VanishingDenominator("phi_weight: x = 0");
  T den = qpoch(y, q, beta);
  if (is_zero(den)) throw VanishingDenominator("phi_weight: (y;q)_beta vanishes");
  T ratio = y / x;
  return ipow(ratio, gamma) * qpoch(x, q, gamma) * qpoch(ratio, q, beta - gamma) / den *
         qbinom(beta, gamma, q);
}

}  // namespace hsv
