#pragma once

// Boundary K-matrices of spin J by every available route: the 2x2 seed, the
// recurrence linear system, the two triangular closed forms, the double-sum
// closed form of the symmetrized matrix N, and the generating function
// F(u, v) = sum_{j,l} u^j v^l N_{j,l} with its difference equations.
//
// Matrices are indexed K^l_j -> k(j, l): row j, column l.

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "hsv/errors.hpp"
#include "hsv/qseries.hpp"
#include "hsv/report.hpp"
#include "hsv/scalar.hpp"
#include "hsv/tensor.hpp"

namespace hsv {

struct BoundaryParams {
  Scalar h;
  Scalar t_plus;
  Scalar t_minus;
  Scalar mu = Scalar(1);
  Scalar nu;
  std::optional<Scalar> t;  // t^2 = t_plus / t_minus when set
  Scalar y;

  /// t_plus = t^2, t_minus = 1.
  static BoundaryParams from_t(const Scalar& h, const Scalar& t, const Scalar& nu, const Scalar& y,
                               const Scalar& mu = Scalar(1)) {
    BoundaryParams p;
    p.h = h;
    p.t_plus = t * t;
    p.t_minus = Scalar(1);
    p.mu = mu;
    p.nu = nu;
    p.t = t;
    p.y = y;
    return p;
  }

  Scalar q() const { return h * h; }
  BoundaryParams at_y(const Scalar& y2) const {
    BoundaryParams p = *this;
    p.y = y2;
    return p;
  }
  BoundaryParams with_mu(const Scalar& m) const {
    BoundaryParams p = *this;
    p.mu = m;
    return p;
  }
  const Scalar& require_t() const {
    if (!t) throw InvalidArgument("this construction needs the parameter t");
    if (t->is_zero()) throw InvalidArgument("t must be nonzero");
    return *t;
  }
  void validate() const {
    if (h.is_zero() || h == Scalar(1) || h == Scalar(-1)) throw InvalidArgument("h must avoid {0, 1, -1}");
    if (nu.is_zero()) throw InvalidArgument("nu must be nonzero");
    if (y.is_zero()) throw InvalidArgument("y must be nonzero");
    if (mu.is_zero()) throw InvalidArgument("mu must be nonzero");
  }
  void validate_off_diagonal() const {
    validate();
    if (t_plus.is_zero() && t_minus.is_zero()) throw InvalidArgument("t_plus and t_minus cannot both vanish");
  }
};

/// (J+1) x (J+1) boundary matrix, entry (j, l) = K^l_j.
struct KMatrix {
  int spin = 0;
  Matrix<Scalar> k;

  KMatrix() = default;
  explicit KMatrix(int J) : spin(J), k(J + 1, J + 1) {}
  Scalar& operator()(int j, int l) { return k(j, l); }
  const Scalar& operator()(int j, int l) const { return k(j, l); }
  friend bool operator==(const KMatrix& a, const KMatrix& b) { return a.spin == b.spin && a.k == b.k; }

  /// sum_j K^l_j.
  Scalar column_sum(int l) const {
    Scalar s;
    for (int j = 0; j <= spin; ++j) s += k(j, l);
    return s;
  }
  bool is_stochastic() const {
    for (int l = 0; l <= spin; ++l)
      if (column_sum(l) != Scalar(1)) return false;
    return true;
  }
  KMatrix scaled(const Scalar& c) const {
    KMatrix r = *this;
    r.k = c * k;
    return r;
  }
};

/// Symmetrized companion of K, entry (j, l) = N_{j,l}.
struct NMatrix {
  int spin = 0;
  Matrix<Scalar> n;

  NMatrix() = default;
  explicit NMatrix(int J) : spin(J), n(J + 1, J + 1) {}
  Scalar& operator()(int j, int l) { return n(j, l); }
  const Scalar& operator()(int j, int l) const { return n(j, l); }
  /// Zero outside [0, J]^2.
  Scalar padded(int j, int l) const {
    if (j < 0 || l < 0 || j > spin || l > spin) return Scalar(0);
    return n(j, l);
  }
  bool is_symmetric() const { return n == n.transposed(); }
  friend bool operator==(const NMatrix& a, const NMatrix& b) { return a.spin == b.spin && a.n == b.n; }
};

namespace detail {

inline void require_spin(int J) {
  if (J < 1) throw InvalidArgument("spin must be >= 1, got " + std::to_string(J));
}

/// Runs `body`, converting any division-type failure into SingularDraw.
template <class F>
auto guard_draw(const char* what, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const SingularDraw&) {
    throw;
  } catch (const NonTerminating&) {
    throw;
  } catch (const Singular& e) {
    throw SingularDraw(std::string(what) + ": " + e.what());
  }
}

}  // namespace detail

/// 2x2 seed solution K_1(x), four free constants t_plus, t_minus, mu, nu.
inline KMatrix k_half(const BoundaryParams& p, const Scalar& x) {
  if (x.is_zero()) throw InvalidArgument("x must be nonzero");
  if (p.nu.is_zero() || p.mu.is_zero() || p.h.is_zero()) throw InvalidArgument("h, mu, nu must be nonzero");
  Scalar q = p.q(), x2 = x * x, ix2 = x2.inverse();
  Scalar C = p.t_minus / (q * p.nu) - q * p.nu * p.t_plus;
  KMatrix K(1);
  K(0, 0) = C + x2 * (p.t_minus - p.t_plus);
  K(0, 1) = p.t_minus * (x2 - ix2) / p.mu;
  K(1, 0) = p.mu * p.t_plus * (x2 - ix2);
  K(1, 1) = C + ix2 * (p.t_minus - p.t_plus);
  return K;
}

/// Coefficients of the two independent recurrence relations at (j, l):
/// each relation is sum of coef * K^{l+dl}_{j+dj} = 0.
struct RecurrenceTerm {
  int dj, dl;
  Scalar coef;
};

inline std::array<std::vector<RecurrenceTerm>, 2> recurrence_terms(int J, const BoundaryParams& p, int j, int l) {
  Scalar q = p.q(), one(1), y2 = p.y * p.y, y4 = y2 * y2;
  const Scalar &tp = p.t_plus, &tm = p.t_minus, &mu = p.mu, &nu = p.nu;
  auto qp = [&](int e) { return ipow(q, e); };
  std::vector<RecurrenceTerm> first{
      {0, 1, mu * tp * qp(2 + 2 * J) * (one - qp(2 * (j - J)))},
      {1, 0, tm * qp(2 * J) * (one - qp(2 + 2 * l)) / mu},
      {1, 1, y2 * qp(2 + J) * (qp(2 * j) - qp(2 * l)) * (tm - nu * nu * q * q * tp) / nu},
      {1, 2, -mu * tp * y4 * qp(2 + 2 * J) * (one - qp(2 * (1 + l - J)))},
      {2, 1, -tm * y4 * qp(2 * J) * (one - qp(4 + 2 * j)) / mu},
  };
  std::vector<RecurrenceTerm> second{
      {0, 1, mu * tp * qp(2 * (2 + l + J)) * (one - qp(2 * j - 2 * J))},
      {1, 0, tm * qp(2 * (1 + j + J)) * (one - qp(2 + 2 * l)) / mu},
      {1, 1, qp(2 + 2 * J) * (qp(2 * j) - qp(2 * l)) * (tp - tm)},
      {1, 2, -mu * tp * qp(2 * (1 + j + J)) * (one - qp(2 * (1 + l - J)))},
      {2, 1, -tm * qp(2 * J + 2 * l) * (one - qp(4 + 2 * j)) / mu},
  };
  return {first, second};
}

/// Full output of the recurrence solver, including diagnostics.
struct RecurrenceSolution {
  int spin = 0;
  int l_cap = 0;
  /// Unnormalized values with K^0_0 = 1 on the window j in [0, J+2], l in [0, l_cap].
  std::vector<std::vector<std::optional<Scalar>>> window;
  std::vector<std::pair<int, int>> free_variables;
  bool consistent = true;
  std::size_t equations = 0;
};

/// Assembles and solves the recurrence system on j in [0, J+2], l in [0, l_cap].
/// Terms with j < 0 are dropped (K vanishes there); an equation touching l < 0
/// or any unknown outside the window with a nonzero coefficient is omitted.
inline RecurrenceSolution solve_k_recurrence(int J, const BoundaryParams& p, int l_cap) {
  detail::require_spin(J);
  p.validate_off_diagonal();
  if (l_cap < J + 1) throw InvalidArgument("l window must reach at least J+1");
  const int jmax = J + 2;
  auto idx = [&](int j, int l) { return static_cast<std::size_t>(j * (l_cap + 1) + l); };
  std::size_t unknowns = static_cast<std::size_t>((jmax + 1) * (l_cap + 1));
  std::vector<LinearEquation<Scalar>> eqs;
  for (int j = -2; j <= jmax; ++j)
    for (int l = -1; l <= l_cap; ++l)
      for (const auto& rel : recurrence_terms(J, p, j, l)) {
        LinearEquation<Scalar> e;
        bool keep = true;
        for (const auto& t : rel) {
          if (t.coef.is_zero()) continue;
          int a = j + t.dj, b = l + t.dl;
          if (a < 0) continue;
          if (b < 0 || a > jmax || b > l_cap) {
            keep = false;
            break;
          }
          e.terms.emplace_back(idx(a, b), t.coef);
        }
        if (keep && !e.terms.empty()) eqs.push_back(std::move(e));
      }
  // Termination at row J+1 and the normalization K^0_0 = 1.
  eqs.push_back({{{idx(J + 1, 0), Scalar(1)}}, Scalar(0)});
  eqs.push_back({{{idx(0, 0), Scalar(1)}}, Scalar(1)});

  auto sol = solve_linear(eqs, unknowns);
  RecurrenceSolution out;
  out.spin = J;
  out.l_cap = l_cap;
  out.consistent = sol.consistent;
  out.equations = eqs.size();
  out.window.assign(jmax + 1, std::vector<std::optional<Scalar>>(l_cap + 1));
  for (int j = 0; j <= jmax; ++j)
    for (int l = 0; l <= l_cap; ++l) out.window[j][l] = sol.value[idx(j, l)];
  for (auto f : sol.free_variables)
    out.free_variables.emplace_back(static_cast<int>(f) / (l_cap + 1), static_cast<int>(f) % (l_cap + 1));
  return out;
}

/// Rescales so that sum_j mu^{l-j} K^l_j = 1 (evaluated at l = 0); at mu = 1
/// this is the unit column-sum convention.
inline KMatrix normalize_k(const KMatrix& K, const Scalar& mu) {
  Scalar s;
  for (int j = 0; j <= K.spin; ++j) s += ipow(mu, -j) * K(j, 0);
  if (s.is_zero()) throw SingularDraw("normalization impossible: weighted column sum vanishes");
  return K.scaled(s.inverse());
}

/// K_J(y) from the recurrence relations with the terminating condition.
/// The output block is unique, rows J+1 and J+2 vanish on it, and the result
/// is normalized by normalize_k.
inline KMatrix k_recurrence(int J, const BoundaryParams& p, int l_cap = -1) {
  if (l_cap < 0) l_cap = J + 3;
  RecurrenceSolution s = solve_k_recurrence(J, p, l_cap);
  if (!s.consistent) throw SingularDraw("recurrence system is inconsistent at this draw");
  KMatrix K(J);
  for (int j = 0; j <= J; ++j)
    for (int l = 0; l <= J; ++l) {
      if (!s.window[j][l]) throw SingularDraw("recurrence solution is not unique at this draw");
      K(j, l) = *s.window[j][l];
    }
  for (int j = J + 1; j <= J + 2; ++j)
    for (int l = 0; l <= J; ++l)
      if (!s.window[j][l] || !s.window[j][l]->is_zero())
        throw NonTerminating("row " + std::to_string(j) + " does not vanish");
  return normalize_k(K, p.mu);
}

/// Upper-triangular solution (t_plus = 0): K^l_j = mu^{j-l} Phi_{q^2}(j | l; -y^2/(nu q^J), -1/(y^2 nu q^J)).
inline KMatrix k_upper(int J, const BoundaryParams& p) {
  detail::require_spin(J);
  p.validate();
  return detail::guard_draw("k_upper", [&] {
    Scalar q = p.q(), qJ = ipow(q, J), y2 = p.y * p.y;
    Scalar a = -y2 / (p.nu * qJ), b = -Scalar(1) / (y2 * p.nu * qJ);
    KMatrix K(J);
    for (int j = 0; j <= J; ++j)
      for (int l = 0; l <= J; ++l) K(j, l) = ipow(p.mu, j - l) * phi_weight(j, l, a, b, q * q);
    return K;
  });
}

/// Lower-triangular solution (t_minus = 0), normalized so that K^J_J = 1.
inline KMatrix k_lower(int J, const BoundaryParams& p) {
  detail::require_spin(J);
  p.validate();
  return detail::guard_draw("k_lower", [&] {
    Scalar q = p.q(), q2 = q * q, y2 = p.y * p.y, h4 = ipow(p.h, 4 - 2 * J);
    Scalar a = -y2 * p.nu * h4, b = -p.nu * h4 / y2;
    Scalar den = qpoch(a, q2, J);
    if (den.is_zero()) throw SingularDraw("k_lower: normalization denominator vanishes");
    Scalar c = ipow(p.y, 4 * J) * qpoch(b, q2, J) / den;
    Scalar qJ = ipow(q, -2 * J);
    KMatrix K(J);
    for (int j = 0; j <= J; ++j)
      for (int l = 0; l <= J; ++l) {
        if (l > j) continue;
        K(j, l) = c * ipow(p.mu * q2, j - l) * qpoch(q2, q2, l) / qpoch(q2, q2, j) * qpoch(qJ, q2, j) /
                  qpoch(qJ, q2, l) * phi_weight(l, j, a, b, q2);
      }
    return K;
  });
}

/// Normalization constant \bar N_J of the generating function.
inline Scalar genfun_nbar(int J, const BoundaryParams& p) {
  const Scalar& t = p.require_t();
  Scalar q = p.q(), q2 = q * q, y2 = p.y * p.y;
  Scalar den = qpoch(-p.nu * y2 * ipow(q, 2 - J), q2, J) * qpoch(ipow(q, -J) * y2 / (p.nu * t * t), q2, J);
  if (den.is_zero()) throw SingularDraw("normalization denominator vanishes");
  return ipow(q, -2 * J * (J + 1)) * ipow(p.y, 4 * J) / ipow(t, 2 * J) * qpoch(ipow(p.y, -4), q2, J) / den;
}

/// N_J = (-t)^J q^{J(J+1)} \bar N_J.
inline Scalar genfun_nj(int J, const BoundaryParams& p) {
  return ipow(-p.require_t(), J) * ipow(p.q(), J * (J + 1)) * genfun_nbar(J, p);
}

/// N_{j,l} as the literal double sum over k in [0, J], s in [0, min(j, l)].
inline NMatrix n_closed(int J, const BoundaryParams& p) {
  detail::require_spin(J);
  p.validate();
  const Scalar& t = p.require_t();
  return detail::guard_draw("n_closed", [&] {
    Scalar q = p.q(), q2 = q * q, y2 = p.y * p.y;
    auto qp = [&](int e) { return ipow(q, e); };
    std::vector<Scalar> outer(J + 1);
    for (int k = 0; k <= J; ++k) {
      Scalar den = qpoch<Scalar>({q2, -qp(-J) / (p.nu * y2), qp(2 - J) * p.nu * t * t / y2}, q2, k);
      if (den.is_zero()) throw SingularDraw("n_closed: outer denominator vanishes");
      outer[k] = qpoch<Scalar>({qp(-2 * J), ipow(p.y, -4)}, q2, k) / den;
    }
    NMatrix N(J);
    for (int j = 0; j <= J; ++j)
      for (int l = 0; l <= J; ++l) {
        Scalar s;
        for (int k = 0; k <= J; ++k)
          for (int ss = 0; ss <= std::min(j, l); ++ss) {
            Scalar term = ipow(Scalar(-1), ss) * qp((k - 2 * ss) * (k + 1)) / ipow(t, j + l - 2 * (k + ss));
            term *= outer[k];
            term *= qpoch(qp(-2 * (J - k)), q2, ss) / qpoch(q2, q2, ss);
            for (int m : {j, l}) term *= qpoch(qp(-2 * k), q2, m - ss) / qpoch(q2, q2, m - ss);
            s += term;
          }
        N(j, l) = s;
      }
    return N;
  });
}

/// N_{j,0} from the terminating 2phi1 form, same normalization as n_closed.
inline Scalar n_first_column(int J, int j, const BoundaryParams& p) {
  detail::require_spin(J);
  if (j < 0 || j > J) throw InvalidArgument("n_first_column: j out of range");
  p.validate();
  const Scalar& t = p.require_t();
  return detail::guard_draw("n_first_column", [&] {
    Scalar q = p.q(), q2 = q * q, y2 = p.y * p.y, hJ = ipow(q, J);
    int n = J - j;
    Scalar c = -p.nu / y2 * ipow(q, 2 + 2 * j) / hJ;
    Scalar pre = genfun_nj(J, p) * ipow(q, 2 * (J + 1) * (J - j)) * ipow(t, J - j) * qpoch(ipow(q, -2 * J), q2, n) /
                 qpoch(q2, q2, n) * qpoch(c, q2, n) / qpoch(ipow(q, 2 * j) / ipow(p.y, 4), q2, n);
    return pre * phi_terminating<Scalar>({ipow(q, -2 * n), -p.nu * y2 * q2 / hJ}, {c}, q2, hJ / (p.nu * t * t * y2), n);
  });
}

/// K^l_j = (-1)^l q^{2j} (mu t)^{j-l} (q^2;q^2)_l / (q^{-2J};q^2)_l N_{j,l}.
inline KMatrix n_to_k(const NMatrix& N, const BoundaryParams& p) {
  const Scalar& t = p.require_t();
  Scalar q = p.q(), q2 = q * q;
  int J = N.spin;
  KMatrix K(J);
  for (int j = 0; j <= J; ++j)
    for (int l = 0; l <= J; ++l)
      K(j, l) = ipow(Scalar(-1), l) * ipow(q, 2 * j) * ipow(p.mu * t, j - l) * qpoch(q2, q2, l) /
                qpoch(ipow(q, -2 * J), q2, l) * N(j, l);
  return K;
}

/// Inverse of n_to_k.
inline NMatrix k_to_n(const KMatrix& K, const BoundaryParams& p) {
  const Scalar& t = p.require_t();
  Scalar q = p.q(), q2 = q * q;
  int J = K.spin;
  NMatrix N(J);
  for (int j = 0; j <= J; ++j)
    for (int l = 0; l <= J; ++l)
      N(j, l) = K(j, l) * ipow(Scalar(-1), l) * ipow(q, -2 * j) * ipow(p.mu * t, l - j) *
                qpoch(ipow(q, -2 * J), q2, l) / qpoch(q2, q2, l);
  return N;
}

/// The K-matrix of the general closed-form route.
inline KMatrix k_closed(int J, const BoundaryParams& p) { return n_to_k(n_closed(J, p), p); }

// Generating function

struct GenFunPoint {
  Scalar u;
  Scalar v;
  Scalar value;
};

namespace detail {

/// prod_{i<k} (-t q^{2J-2i}) prod_{m=1}^{J-k} (u - q^{2m} t).
inline Scalar genfun_pk(int J, int k, const Scalar& u, const Scalar& t, const Scalar& q) {
  Scalar r(1);
  for (int i = 0; i < k; ++i) r *= -t * ipow(q, 2 * J - 2 * i);
  for (int m = 1; m <= J - k; ++m) r *= u - ipow(q, 2 * m) * t;
  return r;
}

}  // namespace detail

/// F(u, v) from the terminating balanced 4phi3 closed form. The factors
/// (q^{-2J}u/t; q^2)_k have been cleared against the normalization so the sum
/// is manifestly a polynomial in u and v.
inline GenFunPoint genfun_eval(const Scalar& u, const Scalar& v, int J, const BoundaryParams& p) {
  detail::require_spin(J);
  p.validate();
  const Scalar& t = p.require_t();
  return detail::guard_draw("genfun_eval", [&] {
    Scalar q = p.q(), q2 = q * q, y2 = p.y * p.y;
    Scalar s;
    for (int k = 0; k <= J; ++k) {
      Scalar num = qpoch<Scalar>({ipow(q, -2 * J), -u * v / ipow(q, 2 + 2 * J), -p.nu * y2 * ipow(q, 2 - J),
                                  ipow(q, -J) * y2 / (p.nu * t * t)},
                                 q2, k);
      Scalar den = qpoch<Scalar>({q2, ipow(q, 2 - 2 * J) * ipow(p.y, 4)}, q2, k);
      if (den.is_zero()) throw SingularDraw("genfun_eval: denominator vanishes");
      s += num / den * ipow(q2, k) * detail::genfun_pk(J, k, u, t, q) * detail::genfun_pk(J, k, v, t, q);
    }
    return GenFunPoint{u, v, genfun_nbar(J, p) * s};
  });
}

/// F_0(u) = F(u, 0) from its own terminating 3phi2 form.
inline Scalar genfun_f0(const Scalar& u, int J, const BoundaryParams& p) {
  detail::require_spin(J);
  p.validate();
  const Scalar& t = p.require_t();
  return detail::guard_draw("genfun_f0", [&] {
    Scalar q = p.q(), q2 = q * q, y2 = p.y * p.y;
    Scalar s;
    for (int k = 0; k <= J; ++k) {
      Scalar num = qpoch<Scalar>({ipow(q, -2 * J), -p.nu * y2 * ipow(q, 2 - J), ipow(q, -J) * y2 / (p.nu * t * t)},
                                 q2, k);
      Scalar den = qpoch<Scalar>({q2, ipow(q, 2 - 2 * J) * ipow(p.y, 4)}, q2, k);
      if (den.is_zero()) throw SingularDraw("genfun_f0: denominator vanishes");
      s += num / den * ipow(q2, k) * detail::genfun_pk(J, k, u, t, q);
    }
    return genfun_nj(J, p) * s;
  });
}

/// sum_{j,l} u^j v^l N_{j,l}.
inline Scalar genfun_poly(const NMatrix& N, const Scalar& u, const Scalar& v) {
  Scalar s;
  for (int j = 0; j <= N.spin; ++j)
    for (int l = 0; l <= N.spin; ++l) s += ipow(u, j) * ipow(v, l) * N(j, l);
  return s;
}

using GenFun = std::function<Scalar(const Scalar&, const Scalar&)>;

/// First coupled q-difference equation (shifts in u, v and both).
inline Scalar genfun_residual_first(const GenFun& F, const Scalar& u, const Scalar& v, int J, const BoundaryParams& p) {
  const Scalar& t = p.require_t();
  Scalar q = p.q(), q2 = q * q, one(1);
  return u * (one - v / t) * (one + v * t) * F(q2 * u, v) - v * (one - u / t) * (one + u * t) * F(u, q2 * v) -
         (u - v) * (one + u * v * ipow(q, -2 * J)) * F(q2 * u, q2 * v);
}

/// Second coupled q-difference equation.
inline Scalar genfun_residual_second(const GenFun& F, const Scalar& u, const Scalar& v, int J,
                                     const BoundaryParams& p) {
  const Scalar& t = p.require_t();
  Scalar q = p.q(), q2 = q * q, one(1), hJ = ipow(q, J), y2 = p.y * p.y, y4 = y2 * y2;
  const Scalar& nu = p.nu;
  return u * (one + v / (q2 * hJ * t * nu * y2)) * (one - t * nu * v / (hJ * y2)) * F(u, q2 * v) -
         v * (one + u / (q2 * hJ * t * nu * y2)) * (one - t * nu * u / (hJ * y2)) * F(q2 * u, v) -
         (u - v) * (one + u * v / (q2 * y4)) * F(u, v);
}

/// Second-order difference equation in u alone (v enters as a parameter).
inline Scalar genfun_residual_u(const GenFun& F, const Scalar& u, const Scalar& v, int J, const BoundaryParams& p) {
  const Scalar& t = p.require_t();
  Scalar q = p.q(), q2 = q * q, one(1), hJ = ipow(q, J), y2 = p.y * p.y, y4 = y2 * y2;
  const Scalar& nu = p.nu;
  Scalar A = q2 * (one - u / (q2 * t)) * (one + t * u / q2) * (one + u * v / (ipow(q, 4) * y4));
  Scalar B = (one - t * u * nu / (hJ * y2)) * (one + u / (q2 * hJ * t * y2 * nu)) * (one + u * v / ipow(q, 2 + 2 * J));
  Scalar C = u * u / (ipow(q, 6) * y2) * (one - ipow(q, -2 * J)) *
             ((one - ipow(q, 2 - 2 * J)) * u * v / y2 - ipow(q, 3) / hJ * v * bracket(q * t * nu) +
              ipow(q, 4) * bracket(y2) - q2 * v * bracket(t) / y2);
  Scalar F0 = F(u, v);
  return A * (F(u / q2, v) - F0) + B * (F(u * q2, v) - F0) - C * F0;
}

/// The single-variable equation specialized to v = 0, written for F_0 directly.
inline Scalar genfun_residual_f0(const std::function<Scalar(const Scalar&)>& F0, const Scalar& u, int J,
                                 const BoundaryParams& p) {
  const Scalar& t = p.require_t();
  Scalar q = p.q(), q2 = q * q, one(1), hJ = ipow(q, J), y2 = p.y * p.y;
  const Scalar& nu = p.nu;
  Scalar A = q2 * (one - u / (q2 * t)) * (one + t * u / q2);
  Scalar B = (one - t * u * nu / (hJ * y2)) * (one + u / (q2 * hJ * t * y2 * nu));
  Scalar C = u * u / (q2 * y2) * (one - ipow(q, -2 * J)) * (y2 - y2.inverse());
  Scalar f = F0(u);
  return A * (F0(u / q2) - f) + B * (F0(q2 * u) - f) - C * f;
}

enum class GenFunSource { closed_form, coefficient_table };

inline std::string to_string(GenFunSource s) {
  return s == GenFunSource::closed_form ? "closed_form" : "coefficient_table";
}

/// Residuals of the two coupled equations and the single-variable equation at (u, v).
inline Report genfun_residuals(const Scalar& u, const Scalar& v, int J, const BoundaryParams& p, GenFunSource source) {
  Stopwatch sw;
  Draw d;
  d.set("u", u).set("v", v).set("J", Scalar(J)).set("h", p.h).set("y", p.y).set("nu", p.nu).set("t", p.require_t());
  return detail::guard_draw("genfun_residuals", [&] {
    GenFun F;
    if (source == GenFunSource::closed_form) {
      F = [&](const Scalar& a, const Scalar& b) { return genfun_eval(a, b, J, p).value; };
    } else {
      NMatrix N = n_closed(J, p);
      F = [N](const Scalar& a, const Scalar& b) { return genfun_poly(N, a, b); };
    }
    Scalar r1 = genfun_residual_first(F, u, v, J, p);
    Scalar r2 = genfun_residual_second(F, u, v, J, p);
    Scalar r3 = genfun_residual_u(F, u, v, J, p);
    ResidualAccumulator acc;
    acc.add(r1);
    acc.add(r2);
    acc.add(r3);
    Report r = make_report("genfun:" + to_string(source), d, acc.max(), sw.ms());
    r.note = "coupled_1=" + r1.str() + " coupled_2=" + r2.str() + " single_u=" + r3.str();
    return r;
  });
}

// Residuals of the defining relations on finite matrices.

/// Both recurrence relations at (j, l), with K^l_j = 0 for j < 0 or j > J.
/// Only meaningful where every referenced column lies in [0, J], i.e. l <= J-2.
inline std::array<Scalar, 2> k_recurrence_residual(const KMatrix& K, const BoundaryParams& p, int j, int l) {
  int J = K.spin;
  std::array<Scalar, 2> out;
  auto rels = recurrence_terms(J, p, j, l);
  for (int r = 0; r < 2; ++r)
    for (const auto& t : rels[r]) {
      int a = j + t.dj, b = l + t.dl;
      if (t.coef.is_zero() || a < 0 || a > J || b < 0) continue;
      if (b > J) throw InvalidArgument("recurrence residual references a column outside the matrix");
      out[r] += t.coef * K(a, b);
    }
  return out;
}

/// Max |residual| of both recurrence relations over j in [-2, J], l in [-1, J-2].
inline Scalar k_recurrence_max_residual(const KMatrix& K, const BoundaryParams& p) {
  ResidualAccumulator acc;
  for (int j = -2; j <= K.spin; ++j)
    for (int l = -1; l <= K.spin - 2; ++l)
      for (const auto& r : k_recurrence_residual(K, p, j, l)) acc.add(r);
  return acc.max();
}

/// First N-level recurrence at (j, l), zero padding outside [0, J]^2.
inline Scalar n_residual_first(const NMatrix& N, int j, int l, const BoundaryParams& p) {
  const Scalar& t = p.require_t();
  Scalar q = p.q(), one(1);
  int J = N.spin;
  auto qp = [&](int e) { return ipow(q, e); };
  Scalar L = qp(2 * j + 2 * l) * (one - qp(2 * (1 + J - j))) * N.padded(j - 1, l) +
             qp(2 * (1 + l + J)) * (one - qp(2 + 2 * j)) * N.padded(j + 1, l) +
             qp(2 * (1 + J + j)) * (t.inverse() - t) * N.padded(j, l);
  Scalar R = qp(2 * j + 2 * l) * (one - qp(2 * (1 + J - l))) * N.padded(j, l - 1) +
             qp(2 * (1 + j + J)) * (one - qp(2 + 2 * l)) * N.padded(j, l + 1) +
             qp(2 * (1 + J + l)) * (t.inverse() - t) * N.padded(j, l);
  return L - R;
}

/// Second N-level recurrence at (j, l), zero padding outside [0, J]^2.
inline Scalar n_residual_second(const NMatrix& N, int j, int l, const BoundaryParams& p) {
  const Scalar& t = p.require_t();
  Scalar q = p.q(), one(1), hJ = ipow(q, N.spin), y2 = p.y * p.y;
  int J = N.spin;
  auto qp = [&](int e) { return ipow(q, e); };
  Scalar c = q * q * hJ * (q * q * t * p.nu - (t * p.nu).inverse());
  Scalar L = y2.inverse() * qp(2 * j) * (one - qp(2 * (1 + J - j))) * N.padded(j - 1, l) +
             y2 * qp(4) * hJ * hJ * (one - qp(2 + 2 * j)) * N.padded(j + 1, l) + c * qp(2 * j) * N.padded(j, l);
  Scalar R = y2.inverse() * qp(2 * l) * (one - qp(2 * (1 + J - l))) * N.padded(j, l - 1) +
             y2 * qp(4) * hJ * hJ * (one - qp(2 + 2 * l)) * N.padded(j, l + 1) + c * qp(2 * l) * N.padded(j, l);
  return L - R;
}

/// Three-term recurrence of the first column at row j (N_{-1,0} = N_{J+1,0} = 0).
inline Scalar n_residual_first_column(const NMatrix& N, int j, const BoundaryParams& p) {
  const Scalar& t = p.require_t();
  Scalar q = p.q(), one(1), hJ = ipow(q, N.spin), y2 = p.y * p.y;
  int J = N.spin;
  return qpoch(ipow(q, 2 * j), q * q, 2) * N.padded(j + 1, 0) +
         (one - ipow(q, 2 * j)) * (bracket(t) + bracket(q * t * p.nu) * ipow(q, 2 * j - 1) / hJ / y2) *
             N.padded(j, 0) -
         (one - ipow(q, 2 * (j - J - 1))) * (one - ipow(q, 2 * j - 2) / (y2 * y2)) * N.padded(j - 1, 0);
}

/// Max |residual| of both N-level recurrences over j, l in [-1, J+1].
inline Scalar n_max_residual(const NMatrix& N, const BoundaryParams& p) {
  ResidualAccumulator acc;
  for (int j = -1; j <= N.spin + 1; ++j)
    for (int l = -1; l <= N.spin + 1; ++l) {
      acc.add(n_residual_first(N, j, l, p));
      acc.add(n_residual_second(N, j, l, p));
    }
  return acc.max();
}

/// Max |residual| of the symmetry K^l_j = (-q^2 mu^2 t_+/t_-)^{j-l} ... K^j_l.
inline Scalar k_symmetry_residual(const KMatrix& K, const BoundaryParams& p) {
  if (p.t_minus.is_zero()) throw InvalidArgument("symmetry needs t_minus != 0");
  Scalar q = p.q(), q2 = q * q, qJ = ipow(q, -2 * K.spin);
  Scalar r = -q2 * p.mu * p.mu * p.t_plus / p.t_minus;
  ResidualAccumulator acc;
  for (int j = 0; j <= K.spin; ++j)
    for (int l = 0; l <= K.spin; ++l) {
      Scalar rhs = ipow(r, j - l) * qpoch(qJ, q2, j) / qpoch(qJ, q2, l) * qpoch(q2, q2, l) / qpoch(q2, q2, j) * K(l, j);
      acc.add(K(j, l) - rhs);
    }
  return acc.max();
}

/// \bar K(x) = M^{-1} K(1/(q x)), with K supplied as a function of its spectral argument.
inline KMatrix kbar(const std::function<KMatrix(const Scalar&)>& k_of, const Matrix<Scalar>& M, const Scalar& x,
                    const Scalar& q) {
  if (x.is_zero() || q.is_zero()) throw InvalidArgument("kbar: x and q must be nonzero");
  return detail::guard_draw("kbar", [&] {
    KMatrix K = k_of((q * x).inverse());
    if (M.rows() != K.k.rows()) throw InvalidArgument("kbar: dimension mismatch");
    KMatrix out(K.spin);
    for (int j = 0; j <= K.spin; ++j)
      for (int l = 0; l <= K.spin; ++l) out(j, l) = K(j, l) / M(j, j);
    return out;
  });
}

// JSON

inline nlohmann::json kmatrix_to_json(const KMatrix& K, const BoundaryParams& p) {
  nlohmann::json params{{"h", p.h.str()},           {"y", p.y.str()},   {"nu", p.nu.str()},
                        {"mu", p.mu.str()},         {"t_plus", p.t_plus.str()},
                        {"t_minus", p.t_minus.str()}};
  if (p.t) params["t"] = p.t->str();
  nlohmann::json rows = nlohmann::json::array();
  for (int j = 0; j <= K.spin; ++j) {
    nlohmann::json row = nlohmann::json::array();
    for (int l = 0; l <= K.spin; ++l) row.push_back(K(j, l).str());
    rows.push_back(row);
  }
  return {{"spin", K.spin}, {"params", params}, {"entries", rows}};
}

inline KMatrix kmatrix_from_json(const nlohmann::json& js) {
  try {
    int J = js.at("spin").get<int>();
    detail::require_spin(J);
    const auto& rows = js.at("entries");
    if (rows.size() != static_cast<std::size_t>(J + 1)) throw InvalidArgument("K JSON: wrong row count");
    KMatrix K(J);
    for (int j = 0; j <= J; ++j) {
      if (rows[j].size() != static_cast<std::size_t>(J + 1)) throw InvalidArgument("K JSON: wrong row length");
      for (int l = 0; l <= J; ++l) K(j, l) = Scalar::parse(rows[j][l].get<std::string>());
    }
    return K;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("K JSON: ") + e.what());
  }
}

}  // namespace hsv
