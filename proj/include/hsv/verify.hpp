#pragma once

// Identity-verification engine. Every check assembles the objects from the
// lattice and boundary builders, forms LHS - RHS exactly and reports the
// largest absolute entry. A check passes only at residual exactly zero.

#include <algorithm>
#include <array>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "json.hpp"

#include "hsv/boundary.hpp"
#include "hsv/identities.hpp"
#include "hsv/lattice.hpp"
#include "hsv/report.hpp"
#include "hsv/tensor.hpp"

namespace hsv {

enum class KRoute { half, recurrence, closed_form, upper, lower };

inline std::string to_string(KRoute r) {
  switch (r) {
    case KRoute::half: return "half";
    case KRoute::recurrence: return "recurrence";
    case KRoute::closed_form: return "closed_form";
    case KRoute::upper: return "upper";
    case KRoute::lower: return "lower";
  }
  return "?";
}

inline KRoute parse_k_route(std::string_view s) {
  if (s == "half") return KRoute::half;
  if (s == "recurrence") return KRoute::recurrence;
  if (s == "closed_form" || s == "closed") return KRoute::closed_form;
  if (s == "upper") return KRoute::upper;
  if (s == "lower") return KRoute::lower;
  throw InvalidArgument("unknown K route '" + std::string(s) + "'");
}

/// Parameters a route actually uses: upper forces t_plus = 0, lower forces t_minus = 0.
inline BoundaryParams route_params(KRoute route, BoundaryParams p) {
  if (route == KRoute::upper) {
    p.t_plus = Scalar(0);
    p.t_minus = Scalar(1);
    p.t.reset();
  } else if (route == KRoute::lower) {
    p.t_plus = Scalar(1);
    p.t_minus = Scalar(0);
    p.t.reset();
  } else if (route == KRoute::closed_form) {
    p = BoundaryParams::from_t(p.h, p.require_t(), p.nu, p.y, p.mu);
  }
  return p;
}

/// K_J(y) by the given route, at p.y. Routes other than `half` are normalized
/// by normalize_k; `half` is the raw seed and needs J = 1.
inline KMatrix build_k(KRoute route, int J, const BoundaryParams& p) {
  BoundaryParams r = route_params(route, p);
  switch (route) {
    case KRoute::half:
      if (J != 1) throw InvalidArgument("the seed route exists only for spin 1");
      return k_half(r, r.y);
    case KRoute::recurrence: return k_recurrence(J, r);
    case KRoute::closed_form: return k_closed(J, r);
    case KRoute::upper: return k_upper(J, r);
    case KRoute::lower: return k_lower(J, r);
  }
  throw InvalidArgument("bad route");
}

namespace detail {

inline Draw boundary_draw(const BoundaryParams& p) {
  Draw d;
  d.set("h", p.h).set("t_plus", p.t_plus).set("t_minus", p.t_minus).set("mu", p.mu).set("nu", p.nu).set("y", p.y);
  if (p.t) d.set("t", *p.t);
  return d;
}

inline Matrix<Scalar> s_matrix(int I, int J, const Scalar& h, const Scalar& lam) {
  return ::hsv::build_s(I, J, {h, lam}).matrix();
}

/// P S_{J,I}(lam) P as an operator on V_I (x) V_J.
inline Matrix<Scalar> s21_matrix(int I, int J, const Scalar& h, const Scalar& lam) {
  return ::hsv::build_s(J, I, {h, lam}).swapped().matrix();
}

template <class F>
Report timed(std::string id, Draw d, F&& residual) {
  Stopwatch sw;
  Scalar r = residual();
  return make_report(std::move(id), std::move(d), r, sw.ms());
}

inline std::string weights_tag(std::initializer_list<int> w) {
  std::string s = "(";
  bool first = true;
  for (int x : w) {
    if (!first) s += ",";
    s += std::to_string(x);
    first = false;
  }
  return s + ")";
}

}  // namespace detail

/// R12(x/y) R13(x/z) R23(y/z) = R23(y/z) R13(x/z) R12(x/y) with stochastic S.
inline Report check_ybe(Weight I, Weight J, Weight K, const Scalar& x, const Scalar& y, const Scalar& z,
                        const Scalar& h) {
  Draw d;
  d.set("h", h).set("x", x).set("y", y).set("z", z);
  return detail::timed("ybe" + detail::weights_tag({I, J, K}), d, [&] {
    ProductSpace sp({static_cast<std::size_t>(I + 1), static_cast<std::size_t>(J + 1), static_cast<std::size_t>(K + 1)});
    auto R12 = sp.embed(detail::s_matrix(I, J, h, x / y), 0, 1);
    auto R13 = sp.embed(detail::s_matrix(I, K, h, x / z), 0, 2);
    auto R23 = sp.embed(detail::s_matrix(J, K, h, y / z), 1, 2);
    return max_abs_difference(R12 * R13 * R23, R23 * R13 * R12);
  });
}

/// Reflection equation with xbar = 1/x:
/// S_IJ(x/y) K_I(x) S_JI(xy) K_J(y) = K_J(y) S_IJ(xy) K_I(x) S_JI(x/y).
inline Scalar reflection_residual(int I, int J, const Scalar& h, const Scalar& x, const Scalar& y, const KMatrix& KI,
                                  const KMatrix& KJ) {
  if (KI.spin != I || KJ.spin != J) throw InvalidArgument("reflection: K spins do not match the weights");
  auto A = kron_identity_right(KI.k, J + 1);
  auto B = kron_identity_left(I + 1, KJ.k);
  auto lhs = detail::s_matrix(I, J, h, x / y) * A * detail::s21_matrix(I, J, h, x * y) * B;
  auto rhs = B * detail::s_matrix(I, J, h, x * y) * A * detail::s21_matrix(I, J, h, x / y);
  return max_abs_difference(lhs, rhs);
}

/// True for the mixed-weight reflection checks that are reported but not asserted.
inline bool reflection_is_exploratory(int I, int J) { return I != J && I >= 2 && J >= 2; }

/// K_I(x) and K_J(y) both from `route` with shared constants.
inline Report check_reflection(Weight I, Weight J, const Scalar& x, const Scalar& y, const BoundaryParams& p,
                               KRoute route) {
  Draw d = detail::boundary_draw(p);
  d.set("x", x).set("y", y);
  Report r = detail::timed("reflection" + detail::weights_tag({I, J}) + ":" + to_string(route), d, [&] {
    KMatrix KI = build_k(route, I, p.at_y(x));
    KMatrix KJ = build_k(route, J, p.at_y(y));
    return reflection_residual(I, J, p.h, x, y, KI, KJ);
  });
  r.exploratory = reflection_is_exploratory(I, J);
  return r;
}

/// Dual reflection equation with \bar K(x) = M^{-1} K(1/(q x)):
/// S_IJ(y/x) Kb_1(x) [Rd_JI(1/(xy))]_21 Kb_2(y) = Kb_2(y) Rd_IJ(1/(xy)) Kb_1(x) [S_JI(y/x)]_21.
inline Scalar dual_reflection_residual(int I, int J, const Scalar& h, const Scalar& x, const Scalar& y,
                                       const KMatrix& KbI, const KMatrix& KbJ) {
  Scalar lam = (x * y).inverse();
  auto A = detail::s_matrix(I, J, h, y / x);
  auto B = build_dual_r_inversion(J, I, h, lam).swapped().matrix();
  auto C = build_dual_r_inversion(I, J, h, lam).matrix();
  auto D = detail::s21_matrix(I, J, h, y / x);
  auto K1 = kron_identity_right(KbI.k, J + 1);
  auto K2 = kron_identity_left(I + 1, KbJ.k);
  return max_abs_difference(A * K1 * B * K2, K2 * C * K1 * D);
}

inline KMatrix build_kbar(KRoute route, int J, const BoundaryParams& p, const Scalar& x) {
  Scalar q = p.q();
  return kbar([&](const Scalar& z) { return build_k(route, J, p.at_y(z)); }, twist_m(J, q), x, q);
}

inline Report check_dual_reflection(Weight I, Weight J, const Scalar& x, const Scalar& y, const BoundaryParams& p,
                                    KRoute route) {
  Draw d = detail::boundary_draw(p);
  d.set("x", x).set("y", y);
  return detail::timed("dual" + detail::weights_tag({I, J}) + ":" + to_string(route), d, [&] {
    return dual_reflection_residual(I, J, p.h, x, y, build_kbar(route, I, p, x), build_kbar(route, J, p, y));
  });
}

/// Double-row transfer matrix configuration. K comes from `boundary`, the dual
/// K-bar from `dual_boundary` (any independent constants are allowed).
struct TransferConfig {
  std::vector<int> site_weights;
  std::vector<Scalar> z;
  int aux_a = 1;
  int aux_b = 1;
  Scalar x, y;
  BoundaryParams boundary;
  BoundaryParams dual_boundary;
  KRoute route = KRoute::closed_form;
};

/// t(x) = Tr_a Kb_a(x) R_{a,1}(x/z_1) ... R_{a,L}(x/z_L) K_a(x) R_{L,a}(z_L x) ... R_{1,a}(z_1 x).
inline Matrix<Scalar> transfer_matrix(int aux, const Scalar& x, const TransferConfig& c) {
  const Scalar& h = c.boundary.h;
  std::vector<std::size_t> dims{static_cast<std::size_t>(aux + 1)};
  for (int w : c.site_weights) dims.push_back(static_cast<std::size_t>(w + 1));
  ProductSpace sp(dims);
  auto T = sp.embed(build_k(c.route, aux, c.boundary.at_y(x)).k, 0);
  for (std::size_t k = 0; k < c.site_weights.size(); ++k) {
    int w = c.site_weights[k];
    auto left = sp.embed(detail::s_matrix(aux, w, h, x / c.z[k]), 0, k + 1);
    auto right = sp.embed(detail::s_matrix(w, aux, h, c.z[k] * x), k + 1, 0);
    T = left * T * right;
  }
  auto Kb = build_kbar(c.route, aux, c.dual_boundary, x);
  return sp.trace_first(sp.embed(Kb.k, 0) * T);
}

/// [t_a(x), t_b(y)] together with the two ingredients of the commutation proof
/// on the same draw: unitarity S12(l) S21(1/l) = 1 and Rd^{t1} R21^{t1} = 1.
inline Report check_transfer_commute(const TransferConfig& c) {
  if (c.site_weights.size() != c.z.size() || c.site_weights.empty())
    throw InvalidArgument("transfer: need one inhomogeneity per site");
  Draw d = detail::boundary_draw(c.boundary);
  d.set("x", c.x).set("y", c.y).set("nu_bar", c.dual_boundary.nu).set("mu_bar", c.dual_boundary.mu);
  if (c.dual_boundary.t) d.set("t_bar", *c.dual_boundary.t);
  for (std::size_t k = 0; k < c.z.size(); ++k) d.set("z" + std::to_string(k + 1), c.z[k]);
  std::string id = "transfer(L=" + std::to_string(c.site_weights.size()) + ",sites=";
  for (int w : c.site_weights) id += std::to_string(w);
  id += ",aux=" + std::to_string(c.aux_a) + std::to_string(c.aux_b) + ")";
  Report r = detail::timed(id, d, [&] {
    auto ta = transfer_matrix(c.aux_a, c.x, c);
    auto tb = transfer_matrix(c.aux_b, c.y, c);
    ResidualAccumulator acc;
    acc.add(max_abs_difference(ta * tb, tb * ta));
    const Scalar& h = c.boundary.h;
    for (int aux : {c.aux_a, c.aux_b})
      for (std::size_t k = 0; k < c.z.size(); ++k) {
        int w = c.site_weights[k];
        Scalar lam = c.x / c.z[k];
        auto unit = detail::s_matrix(aux, w, h, lam) * detail::s21_matrix(aux, w, h, lam.inverse());
        acc.add(max_abs_difference(unit, Matrix<Scalar>::identity(unit.rows())));
        Tensor rd = build_dual_r_inversion(aux, w, h, lam);
        Tensor r21 = build_s(w, aux, {h, lam.inverse()}).swapped();
        auto prod = rd.partial_transpose_first().matrix() * r21.partial_transpose_first().matrix();
        acc.add(max_abs_difference(prod, Matrix<Scalar>::identity(prod.rows())));
      }
    return acc.max();
  });
  return r;
}

// Degenerate reflection equation and the Phi identity.

namespace detail {

inline Scalar phi_identity_lhs(int al, int be, int ga, int de, const Scalar& x, const Scalar& y, const Scalar& z,
                               const Scalar& u, const Scalar& v, const Scalar& q2) {
  Scalar s;
  for (int b1 = 0; b1 <= al; ++b1)
    for (int b2 = 0; b2 <= al + be - b1; ++b2)
      s += phi_weight(b1, al, u, v, q2) * phi_weight(b2, al + be - b1, z * x, z * v, q2) *
           phi_weight(ga, b1, x, u, q2) * phi_weight(de, std::max(0, b1 + b2 - ga), z * y, z * u, q2) *
           Scalar(b1 + b2 - ga >= 0 ? 1 : 0);
  return s;
}

inline Scalar phi_identity_rhs(int al, int be, int ga, int de, const Scalar& x, const Scalar& y, const Scalar& z,
                               const Scalar& u, const Scalar& v, const Scalar& q2) {
  Scalar s;
  for (int b1 = 0; b1 <= al; ++b1)
    for (int b2 = 0; b2 <= al + be - b1; ++b2) {
      if (b1 + b2 - al < 0) continue;
      s += phi_weight(ga, b1, x, y, q2) * phi_weight(b1, al, y, v, q2) * phi_weight(ga + de - b1, b2, z * x, z * v, q2) *
           phi_weight(b1 + b2 - al, be, z * y, z * u, q2);
    }
  return s;
}

}  // namespace detail

/// Quartic Phi identity behind the degenerate reflection equation, for all
/// external indices alpha, beta, gamma, delta in [0, bound]. The free dual
/// spectral points enter as u = ybar, v = xbar.
inline Report check_degenerate_reflection(const Scalar& h, const Scalar& x, const Scalar& y, const Scalar& xbar,
                                          const Scalar& ybar, const Scalar& z, int bound) {
  if (bound < 0) throw InvalidArgument("index bound must be nonnegative");
  Draw d;
  d.set("h", h).set("x", x).set("y", y).set("xbar", xbar).set("ybar", ybar).set("z", z).set("bound", Scalar(bound));
  return detail::timed("phi_identity", d, [&] {
    Scalar q2 = ipow(h, 4);
    ResidualAccumulator acc;
    for (int al = 0; al <= bound; ++al)
      for (int be = 0; be <= bound; ++be)
        for (int ga = 0; ga <= bound; ++ga)
          for (int de = 0; de <= bound; ++de)
            acc.add(detail::phi_identity_lhs(al, be, ga, de, x, y, z, ybar, xbar, q2) -
                    detail::phi_identity_rhs(al, be, ga, de, x, y, z, ybar, xbar, q2));
    return acc.max();
  });
}

/// Matrix form of the degenerate reflection equation on the truncated space
/// {0..N} x {0..N}, with S12(a,b) = Phi(i | j'; a, b), S21(a,b) = Phi(j | i'; a, b)
/// and K(a,b) = Phi(j | l; a, b). Columns with i'+j' <= N are exact because
/// every factor conserves or lowers the total charge.
inline Report check_degenerate_reflection_matrix(const Scalar& h, const Scalar& x, const Scalar& y,
                                                 const Scalar& xbar, const Scalar& ybar, const Scalar& z, int N) {
  Draw d;
  d.set("h", h).set("x", x).set("y", y).set("xbar", xbar).set("ybar", ybar).set("z", z).set("truncation", Scalar(N));
  return detail::timed("degenerate_reflection_matrix", d, [&] {
    Scalar q2 = ipow(h, 4);
    std::size_t n = static_cast<std::size_t>(N + 1), D = n * n;
    auto s12 = [&](const Scalar& a, const Scalar& b, bool second) {
      Matrix<Scalar> M(D, D);
      for (int i = 0; i <= N; ++i)
        for (int j = 0; j <= N; ++j)
          for (int ip = 0; ip <= N; ++ip) {
            int jp = i + j - ip;
            if (jp < 0 || jp > N) continue;
            M(i * n + j, ip * n + jp) = second ? phi_weight(j, ip, a, b, q2) : phi_weight(i, jp, a, b, q2);
          }
      return M;
    };
    auto kmat = [&](const Scalar& a, const Scalar& b) {
      Matrix<Scalar> K(n, n);
      for (int j = 0; j <= N; ++j)
        for (int l = 0; l <= N; ++l) K(j, l) = phi_weight(j, l, a, b, q2);
      return K;
    };
    auto K1 = kron_identity_right(kmat(z * x, z * xbar), n);
    auto K2 = kron_identity_left(n, kmat(z * y, z * ybar));
    auto lhs = s12(x, y, false) * K1 * s12(y, xbar, true) * K2;
    auto rhs = K2 * s12(x, ybar, false) * K1 * s12(ybar, xbar, true);
    ResidualAccumulator acc;
    for (std::size_t r = 0; r < D; ++r)
      for (std::size_t c = 0; c < D; ++c)
        if (static_cast<int>(c / n + c % n) <= N) acc.add(lhs(r, c) - rhs(r, c));
    return acc.max();
  });
}

/// Defining relations of K for one route: both recurrence relations on the
/// finite matrix; for the closed form also the N-level relations and the
/// first-column recurrence; at mu = 1 the column sums must be constant.
inline Report check_k_defining(int J, const BoundaryParams& p, KRoute route) {
  Draw d = detail::boundary_draw(p);
  d.set("J", Scalar(J));
  return detail::timed("k_defining:" + to_string(route) + "(J=" + std::to_string(J) + ")", d, [&] {
    BoundaryParams r = route_params(route, p);
    KMatrix K = build_k(route, J, r);
    ResidualAccumulator acc;
    acc.add(k_recurrence_max_residual(K, r));
    if (route == KRoute::closed_form) {
      NMatrix N = n_closed(J, r);
      acc.add(n_max_residual(N, r));
      for (int j = 0; j <= J; ++j) acc.add(n_residual_first_column(N, j, r));
    }
    if (r.mu == Scalar(1))
      for (int l = 1; l <= J; ++l) acc.add(K.column_sum(l) - K.column_sum(0));
    return acc.max();
  });
}

/// Crossing and unitarity relations of S and Rbar at one draw.
inline Report check_crossing(Weight I, Weight J, const Scalar& h, const Scalar& lam) {
  Draw d;
  d.set("h", h).set("lambda", lam);
  return detail::timed("crossing" + detail::weights_tag({I, J}), d, [&] {
    Scalar q = h * h, q2 = q * q;
    std::size_t dim = static_cast<std::size_t>((I + 1) * (J + 1));
    auto one = Matrix<Scalar>::identity(dim);
    ResidualAccumulator acc;
    // Unitarity of Rbar and S.
    auto rb = build_rbar(I, J, {h, lam});
    auto rb21 = build_rbar(J, I, {h, lam.inverse()}).swapped();
    acc.add(max_abs_difference(rb.matrix() * rb21.matrix(), one));
    acc.add(max_abs_difference(detail::s_matrix(I, J, h, lam) * detail::s21_matrix(I, J, h, lam.inverse()), one));
    // Crossing symmetry f Rbar_12(l) = V_1 Rbar_21^{t1}((q l)^{-1}) V_1^{-1}.
    CrossingData c = build_crossing(I, J, {h, lam});
    auto V1 = kron_identity_right(c.V, J + 1);
    auto V1i = kron_identity_right(c.V.inverse(), J + 1);
    auto rbq = build_rbar(J, I, {h, (q * lam).inverse()}).swapped().partial_transpose_first();
    acc.add(max_abs_difference(c.f * rb.matrix(), V1 * rbq.matrix() * V1i));
    // g(l) = f(q l) / f(l).
    acc.add(c.g - crossing_f(I, J, q, q * lam) / c.f);
    // Crossing unitarity M_1 S_12^{t1}(l) M_1^{-1} S_21^{t1}(1/(q^2 l)) = g I.
    auto M1 = kron_identity_right(c.M, J + 1);
    auto M1i = kron_identity_right(c.M.inverse(), J + 1);
    auto st = build_s(I, J, {h, lam}).partial_transpose_first().matrix();
    auto s21t = build_s(J, I, {h, (q2 * lam).inverse()}).swapped().partial_transpose_first().matrix();
    acc.add(max_abs_difference(M1 * st * M1i * s21t, c.g * one));
    // The same for Rbar, where no twist is needed.
    auto rbt = rb.partial_transpose_first().matrix();
    auto rb21t = build_rbar(J, I, {h, (q2 * lam).inverse()}).swapped().partial_transpose_first().matrix();
    acc.add(max_abs_difference(rbt * rb21t, c.g * one));
    // [M (x) M, S] = 0.
    auto MM = kron_identity_right(c.M, J + 1) * kron_identity_left(I + 1, twist_m(J, q));
    auto s = detail::s_matrix(I, J, h, lam);
    acc.add(max_abs_difference(MM * s, s * MM));
    // Dual operator: both routes agree and Rd^{t1} R21^{t1} = 1.
    Tensor rd = build_dual_r_inversion(I, J, h, lam);
    acc.add(max_abs_difference(rd.matrix(), build_dual_r_conjugation(I, J, h, lam).matrix()));
    auto r21t = build_s(J, I, {h, lam.inverse()}).swapped().partial_transpose_first().matrix();
    acc.add(max_abs_difference(rd.partial_transpose_first().matrix() * r21t, one));
    return acc.max();
  });
}

/// Column sums of S and of its factorized and L-operator constructions.
inline Report check_stochastic_s(Weight I, Weight J, const Scalar& h, const Scalar& lam) {
  Draw d;
  d.set("h", h).set("lambda", lam);
  return detail::timed("stochastic_s" + detail::weights_tag({I, J}), d, [&] {
    ResidualAccumulator acc;
    std::vector<Tensor> ts{build_s(I, J, {h, lam}), build_s_factorized(I, J, {h, lam})};
    if (I == 1) ts.push_back(build_l_operators(J, h, lam).s_1J);
    if (J == 1) ts.push_back(build_l_operators(I, h, lam).s_J1);
    for (const auto& t : ts) {
      const auto& m = t.matrix();
      for (std::size_t c = 0; c < m.cols(); ++c) {
        Scalar s;
        for (std::size_t r = 0; r < m.rows(); ++r) s += m(r, c);
        acc.add(s - Scalar(1));
      }
      acc.add(max_abs_difference(t.matrix(), ts[0].matrix()));
    }
    return acc.max();
  });
}

/// Column sums of K at mu = 1 for one route.
inline Report check_stochastic_k(int J, const BoundaryParams& p, KRoute route) {
  BoundaryParams p1 = p.with_mu(Scalar(1));
  Draw d = detail::boundary_draw(p1);
  d.set("J", Scalar(J));
  return detail::timed("stochastic_k:" + to_string(route) + "(J=" + std::to_string(J) + ")", d, [&] {
    KMatrix K = build_k(route, J, p1);
    ResidualAccumulator acc;
    for (int l = 0; l <= J; ++l) acc.add(K.column_sum(l) - Scalar(1));
    return acc.max();
  });
}

/// Route equality at spin J: recurrence vs closed form (t_+ = t^2, t_- = 1),
/// upper vs recurrence at t_+ = 0, lower vs recurrence at t_- = 0, window
/// independence, the 2phi1 first column, and the mu-scaling law.
inline Report check_routes(int J, const BoundaryParams& p, const Scalar& mu2) {
  Draw d = detail::boundary_draw(p);
  d.set("J", Scalar(J)).set("mu2", mu2);
  return detail::timed("routes(J=" + std::to_string(J) + ")", d, [&] {
    ResidualAccumulator acc;
    BoundaryParams pc = route_params(KRoute::closed_form, p);
    KMatrix kc = k_closed(J, pc);
    KMatrix kr = k_recurrence(J, pc);
    acc.add(max_abs_difference(kr.k, kc.k));
    acc.add(max_abs_difference(kr.k, k_recurrence(J, pc, J + 4).k));
    BoundaryParams pu = route_params(KRoute::upper, p);
    acc.add(max_abs_difference(k_upper(J, pu).k, k_recurrence(J, pu).k));
    BoundaryParams pl = route_params(KRoute::lower, p);
    acc.add(max_abs_difference(k_lower(J, pl).k, k_recurrence(J, pl).k));
    NMatrix N = n_closed(J, pc);
    for (int j = 0; j <= J; ++j) acc.add(n_first_column(J, j, pc) - N(j, 0));
    acc.add(k_symmetry_residual(kc, pc));
    KMatrix k2 = k_closed(J, pc.with_mu(mu2));
    for (int j = 0; j <= J; ++j)
      for (int l = 0; l <= J; ++l) acc.add(k2(j, l) - ipow(mu2 / pc.mu, j - l) * kc(j, l));
    if (J == 1) {
      // The spin-1 routes reproduce the seed up to an overall scalar.
      KMatrix seed = k_half(pc, pc.y);
      Scalar c = seed(0, 0) / kc(0, 0);
      acc.add(max_abs_difference(seed.k, kc.scaled(c).k));
    }
    return acc.max();
  });
}

/// Generating-function relations at spin J and one point (u, v).
inline Report check_genfun(int J, const BoundaryParams& p, const Scalar& u, const Scalar& v) {
  Draw d = detail::boundary_draw(p);
  d.set("J", Scalar(J)).set("u", u).set("v", v);
  return detail::timed("genfun(J=" + std::to_string(J) + ")", d, [&] {
    ResidualAccumulator acc;
    for (auto src : {GenFunSource::closed_form, GenFunSource::coefficient_table})
      acc.add(genfun_residuals(u, v, J, p, src).max_abs_residual);
    const Scalar& t = p.require_t();
    Scalar q = p.q(), q2 = q * q;
    NMatrix N = n_closed(J, p);
    acc.add(genfun_eval(u, v, J, p).value - genfun_poly(N, u, v));
    acc.add(genfun_eval(u, v, J, p).value - genfun_eval(v, u, J, p).value);
    acc.add(genfun_eval(q2 * t, v, J, p).value - qpoch(-v * t * ipow(q, -2 * J), q2, J));
    acc.add(genfun_eval(u, Scalar(0), J, p).value - genfun_f0(u, J, p));
    acc.add(genfun_residual_f0([&](const Scalar& a) { return genfun_f0(a, J, p); }, u, J, p));
    acc.add(n_max_residual(N, p));
    return acc.max();
  });
}

// Suites

inline constexpr std::array<std::string_view, 10> kSuites = {"ybe",       "reflection", "dual",    "crossing",
                                                              "stochastic", "transfer",   "genfun",  "phi_identity",
                                                              "qseries",    "routes"};

struct SuiteOptions {
  int max_index = 3;          // phi_identity external index bound
  bool matrix_level = false;  // phi_identity: also run the truncated matrix check
  int resample_cap = 100;
};

struct SuiteResult {
  std::string suite;
  std::uint64_t seed = 0;
  std::vector<Report> trials;

  int count(Status s, bool exploratory) const {
    return static_cast<int>(std::count_if(trials.begin(), trials.end(), [&](const Report& r) {
      return r.status == s && r.exploratory == exploratory;
    }));
  }
  /// True iff every non-exploratory trial passed.
  bool ok() const {
    return std::all_of(trials.begin(), trials.end(), [](const Report& r) { return r.exploratory || r.passed(); });
  }
};

namespace detail {

struct ReflectionCase {
  int I, J;
  KRoute route;
};

inline const std::vector<ReflectionCase>& reflection_cases() {
  static const std::vector<ReflectionCase> cases = [] {
    std::vector<ReflectionCase> c{{1, 1, KRoute::half}};
    for (KRoute r : {KRoute::recurrence, KRoute::closed_form, KRoute::upper, KRoute::lower})
      for (int J = 1; J <= 3; ++J) c.push_back({1, J, r});
    c.push_back({2, 2, KRoute::closed_form});
    c.push_back({2, 2, KRoute::recurrence});
    c.push_back({2, 3, KRoute::closed_form});
    return c;
  }();
  return cases;
}

struct TransferCase {
  std::vector<int> sites;
  int aux_a, aux_b;
  KRoute route;
};

inline const std::vector<TransferCase>& transfer_cases() {
  static const std::vector<TransferCase> cases{
      {{1, 1}, 1, 1, KRoute::closed_form}, {{2}, 1, 1, KRoute::closed_form}, {{1, 2}, 1, 2, KRoute::closed_form},
      {{1}, 2, 2, KRoute::closed_form},    {{2, 1}, 1, 1, KRoute::upper},     {{1, 1}, 1, 1, KRoute::lower},
  };
  return cases;
}

inline BoundaryParams sample_boundary(Sampler& s) {
  BoundaryParams p = BoundaryParams::from_t(s.generic(), s.generic(), s.generic(), s.generic(), s.generic());
  return p;
}

/// Generic K constants t_plus, t_minus independent of t, for the seed and recurrence routes.
inline BoundaryParams sample_free_boundary(Sampler& s) {
  BoundaryParams p = sample_boundary(s);
  p.t_plus = s.rational();
  p.t_minus = s.rational();
  p.t.reset();
  return p;
}

inline Report run_trial(std::string_view suite, std::size_t index, Sampler& s, const SuiteOptions& opt) {
  if (suite == "ybe") {
    int c = static_cast<int>(index % 27);
    return check_ybe(c / 9 + 1, c / 3 % 3 + 1, c % 3 + 1, s.generic(), s.generic(), s.generic(), s.generic());
  }
  if (suite == "reflection") {
    const auto& cases = reflection_cases();
    const auto& c = cases[index % cases.size()];
    BoundaryParams p = (c.route == KRoute::half || c.route == KRoute::recurrence) ? sample_free_boundary(s)
                                                                                  : sample_boundary(s);
    return check_reflection(c.I, c.J, s.generic(), s.generic(), p, c.route);
  }
  if (suite == "dual") {
    static const std::vector<ReflectionCase> cases{{1, 1, KRoute::closed_form}, {1, 2, KRoute::closed_form},
                                                   {2, 1, KRoute::closed_form}, {2, 2, KRoute::closed_form},
                                                   {1, 2, KRoute::upper},       {1, 1, KRoute::lower}};
    const auto& c = cases[index % cases.size()];
    return check_dual_reflection(c.I, c.J, s.generic(), s.generic(), sample_boundary(s), c.route);
  }
  if (suite == "crossing") {
    int c = static_cast<int>(index % 9);
    return check_crossing(c / 3 + 1, c % 3 + 1, s.generic(), s.generic());
  }
  if (suite == "stochastic") {
    std::size_t c = index % 13;
    if (c < 9) return check_stochastic_s(static_cast<int>(c / 3 + 1), static_cast<int>(c % 3 + 1), s.generic(), s.generic());
    static const std::array<KRoute, 4> routes{KRoute::recurrence, KRoute::closed_form, KRoute::upper, KRoute::lower};
    int J = s.integer(1, 3);
    KRoute r = routes[c - 9];
    BoundaryParams p = r == KRoute::recurrence ? sample_free_boundary(s) : sample_boundary(s);
    return check_stochastic_k(J, p, r);
  }
  if (suite == "transfer") {
    const auto& cases = transfer_cases();
    const auto& c = cases[index % cases.size()];
    TransferConfig cfg;
    cfg.site_weights = c.sites;
    for (std::size_t k = 0; k < c.sites.size(); ++k) cfg.z.push_back(s.generic());
    cfg.aux_a = c.aux_a;
    cfg.aux_b = c.aux_b;
    cfg.x = s.generic();
    cfg.y = s.generic();
    cfg.boundary = sample_boundary(s);
    cfg.dual_boundary = sample_boundary(s);
    cfg.dual_boundary.h = cfg.boundary.h;
    cfg.route = c.route;
    return check_transfer_commute(cfg);
  }
  if (suite == "genfun") {
    int J = static_cast<int>(index % 3) + 1;
    BoundaryParams p = sample_boundary(s);
    return check_genfun(J, p, s.generic(), s.generic());
  }
  if (suite == "phi_identity") {
    Scalar h = s.generic(), x = s.generic(), y = s.generic(), xb = s.generic(), yb = s.generic(), z = s.generic();
    Report r = check_degenerate_reflection(h, x, y, xb, yb, z, opt.max_index);
    if (opt.matrix_level) {
      Report m = check_degenerate_reflection_matrix(h, x, y, xb, yb, z, 4);
      if (!m.passed()) return m;
      r.ms += m.ms;
      r.note = "matrix level checked";
    }
    return r;
  }
  if (suite == "qseries") {
    auto kind = kAllQSeriesIdentities[index % kAllQSeriesIdentities.size()];
    return check_qseries_identity(kind, sample_qseries_draw(kind, s));
  }
  if (suite == "routes") {
    int J = static_cast<int>(index % 4) + 1;
    BoundaryParams p = sample_boundary(s);
    return check_routes(J, p, s.generic());
  }
  throw InvalidArgument("unknown suite '" + std::string(suite) + "'");
}

}  // namespace detail

inline bool is_suite(std::string_view id) {
  return std::find(kSuites.begin(), kSuites.end(), id) != kSuites.end();
}

/// Runs `trials` independent trials. Trial i draws from derive_seed(seed, i);
/// a singular draw is resampled from derive_seed(trial seed, attempt) up to the
/// cap, after which the trial is reported as singular.
inline SuiteResult run_suite(std::string_view suite, std::uint64_t seed, int trials, const SuiteOptions& opt = {}) {
  if (!is_suite(suite)) throw InvalidArgument("unknown suite '" + std::string(suite) + "'");
  if (trials < 0) throw InvalidArgument("trial count must be nonnegative");
  SuiteResult out;
  out.suite = std::string(suite);
  out.seed = seed;
  for (int i = 0; i < trials; ++i) {
    std::uint64_t trial_seed = derive_seed(seed, static_cast<std::uint64_t>(i));
    std::vector<std::string> reasons;
    std::optional<Report> rep;
    for (int attempt = 0; attempt < opt.resample_cap && !rep; ++attempt) {
      Sampler s(attempt == 0 ? trial_seed : derive_seed(trial_seed, static_cast<std::uint64_t>(attempt)));
      try {
        rep = detail::run_trial(suite, static_cast<std::size_t>(i), s, opt);
      } catch (const Singular& e) {
        reasons.emplace_back(e.what());
      }
    }
    if (!rep) {
      Report r;
      r.identity = out.suite;
      r.status = Status::singular;
      r.note = "resample cap reached";
      rep = r;
    }
    rep->draw.seed = trial_seed;
    rep->draw.rejections = static_cast<int>(reasons.size());
    rep->draw.rejection_reasons = std::move(reasons);
    out.trials.push_back(std::move(*rep));
  }
  return out;
}

inline nlohmann::json report_params_json(const Draw& d) {
  nlohmann::json p = nlohmann::json::object();
  for (const auto& [k, v] : d.params) p[k] = v.str();
  return p;
}

inline nlohmann::json suite_to_json(const SuiteResult& r, bool with_timing = true) {
  nlohmann::json trials = nlohmann::json::array();
  for (std::size_t i = 0; i < r.trials.size(); ++i) {
    const Report& t = r.trials[i];
    nlohmann::json j{{"id", i},
                     {"identity", t.identity},
                     {"status", to_string(t.status)},
                     {"residual", t.max_abs_residual.str()},
                     {"params", report_params_json(t.draw)},
                     {"rejections", t.draw.rejections}};
    if (with_timing) j["ms"] = static_cast<long>(t.ms + 0.5);
    if (t.exploratory) j["exploratory"] = true;
    if (!t.note.empty()) j["note"] = t.note;
    trials.push_back(j);
  }
  nlohmann::json summary{{"pass", r.count(Status::pass, false)},
                         {"fail", r.count(Status::fail, false)},
                         {"singular", r.count(Status::singular, false)}};
  int exp_total = 0;
  for (const auto& t : r.trials) exp_total += t.exploratory ? 1 : 0;
  if (exp_total > 0)
    summary["exploratory"] = {{"pass", r.count(Status::pass, true)}, {"fail", r.count(Status::fail, true)},
                              {"singular", r.count(Status::singular, true)}};
  return {{"suite", r.suite}, {"seed", r.seed}, {"trials", trials}, {"summary", summary}};
}

}  // namespace hsv
