#pragma once

// Higher-spin R-matrix on V_I (x) V_J, its symmetric and stochastic gauges,
// the factorized stochastic form, degenerate points, L-operators, crossing
// data and the dual-equation operator.
//
// Scalar-valued builders evaluate at generic points. The *_limit variants
// evaluate at points where the closed form has a removable 0/0 by running the
// same code over the Laurent field at lambda0 * (1 + eps).

#include <algorithm>
#include <array>
#include <string>
#include <string_view>

#include "json.hpp"

#include "hsv/errors.hpp"
#include "hsv/laurent.hpp"
#include "hsv/qseries.hpp"
#include "hsv/scalar.hpp"
#include "hsv/tensor.hpp"

namespace hsv {

/// Highest weight I of the (I+1)-dimensional module V_I. Always >= 1.
class Weight {
 public:
  Weight(int v) : v_(v) {  // NOLINT(google-explicit-constructor)
    if (v < 1) throw InvalidArgument("weight must be >= 1, got " + std::to_string(v));
  }
  int value() const { return v_; }
  operator int() const { return v_; }  // NOLINT(google-explicit-constructor)

 private:
  int v_;
};

/// h = q^{1/2} and the spectral parameter lambda.
struct ModelParams {
  Scalar h;
  Scalar lambda;

  Scalar q() const { return h * h; }
  void validate() const {
    if (h.is_zero() || h == Scalar(1) || h == Scalar(-1)) throw InvalidArgument("h must avoid {0, 1, -1}");
    if (lambda.is_zero()) throw InvalidArgument("lambda must be nonzero");
  }
};

using Tensor = BlockTensor<Scalar>;

namespace detail {

/// Runs `body`, converting any division-type failure into SingularParameter.
template <class F>
auto guard_parameter(const char* what, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const SingularParameter&) {
    throw;
  } catch (const Singular& e) {
    throw SingularParameter(std::string(what) + ": " + e.what());
  }
}

template <class T>
T r_element(int I, int J, const T& h, const T& lam, int i, int j, int ip, int jp) {
  if (i + j != ip + jp) return T(0);
  T q = h * h, q2 = q * q, l2 = lam * lam, il2 = T(1) / l2;
  auto qp = [&](int e) { return ipow(q, e); };
  T den = qpoch(il2 * qp(-I - J), q2, i + j) * qpoch(qp(-2 * J), q2, jp);
  if (is_zero(den)) throw SingularParameter("R-matrix prefactor denominator vanishes");
  T pre = qp(ip * jp - i * j - i * J - I * jp) * qbinom(i + j, i, q2) * qpoch(il2 * qp(I - J), q2, jp) *
          qpoch(il2 * qp(J - I), q2, i) * qpoch(qp(-2 * J), q2, j) / den;
  T s = phi_terminating<T>({qp(-2 * i), qp(-2 * jp), l2 * qp(-I - J), l2 * qp(2 + I + J - 2 * i - 2 * j)},
                           {qp(-2 * i - 2 * j), l2 * qp(2 + I - J - 2 * i), l2 * qp(2 + J - I - 2 * jp)}, q2, q2,
                           std::min(i, jp));
  return pre * s;
}

template <class T>
T s_twist(int I, int J, const T& h, int i, int j, int ip, int jp) {
  return ipow(h * h, i * j - ip * jp - J * i + I * jp);
}

template <class T, class F>
BlockTensor<T> tabulate(int I, int J, F&& entry) {
  BlockTensor<T> out(I, J);
  for (int i = 0; i <= I; ++i)
    for (int j = 0; j <= J; ++j)
      for (int ip = 0; ip <= I; ++ip) {
        int jp = i + j - ip;
        if (jp < 0 || jp > J) continue;
        out.at(i, j, ip, jp) = entry(i, j, ip, jp);
      }
  return out;
}

template <class T>
BlockTensor<T> build_r(int I, int J, const T& h, const T& lam) {
  return tabulate<T>(I, J, [&](int i, int j, int ip, int jp) { return r_element(I, J, h, lam, i, j, ip, jp); });
}

template <class T>
BlockTensor<T> build_rbar(int I, int J, const T& h, const T& lam) {
  return tabulate<T>(I, J, [&](int i, int j, int ip, int jp) {
    return ipow(lam, i - ip) * r_element(I, J, h, lam, i, j, ip, jp);
  });
}

template <class T>
BlockTensor<T> build_s(int I, int J, const T& h, const T& lam) {
  return tabulate<T>(I, J, [&](int i, int j, int ip, int jp) {
    return s_twist(I, J, h, i, j, ip, jp) * r_element(I, J, h, lam, i, j, ip, jp);
  });
}

template <class T>
BlockTensor<T> build_s_factorized(int I, int J, const T& h, const T& lam) {
  T q = h * h, q2 = q * q, l2 = lam * lam;
  auto qp = [&](int e) { return ipow(q, e); };
  T x1 = qp(J - I) / l2, y1 = qp(-I - J) / l2, x2 = l2 / qp(I + J), y2 = qp(-2 * J);
  return tabulate<T>(I, J, [&](int i, int j, int, int jp) {
    T s(0);
    for (int m = 0; m <= i + j; ++m)
      s += phi_weight(m - j, m, x1, y1, q2) * phi_weight(i + j - m, jp, x2, y2, q2);
    return s;
  });
}

/// Evaluates a Laurent-valued tensor builder at lambda0 (1 + eps) and returns
/// the eps^0 coefficients, growing the working precision on demand.
template <class Build>
Tensor tensor_limit(int I, int J, const Scalar& lambda0, Build&& build) {
  for (int work : {8, 16, 32, 64}) {
    try {
      BlockTensor<Laurent> t = build(Laurent::perturbed(lambda0, work));
      Tensor out(I, J);
      for (int i = 0; i <= I; ++i)
        for (int j = 0; j <= J; ++j)
          for (int ip = 0; ip <= I; ++ip)
            for (int jp = 0; jp <= J; ++jp) out.at(i, j, ip, jp) = t.at(i, j, ip, jp).limit();
      return out;
    } catch (const SingularParameter&) {
      if (work == 64) throw;
    }
  }
  throw SingularParameter("limit did not stabilize");
}

}  // namespace detail

/// R_{I,J}(lambda)^{i',j'}_{i,j}; zero unless i+j = i'+j'.
inline Scalar r_element(Weight I, Weight J, const ModelParams& p, int i, int j, int ip, int jp) {
  if (i < 0 || i > I || ip < 0 || ip > I || j < 0 || j > J || jp < 0 || jp > J)
    throw InvalidArgument("r_element: index out of range");
  p.validate();
  return detail::guard_parameter("r_element",
                                 [&] { return detail::r_element<Scalar>(I, J, p.h, p.lambda, i, j, ip, jp); });
}

inline Tensor build_r(Weight I, Weight J, const ModelParams& p) {
  p.validate();
  return detail::guard_parameter("build_r", [&] { return detail::build_r<Scalar>(I, J, p.h, p.lambda); });
}

/// Symmetric gauge: lambda^{i-i'} R.
inline Tensor build_rbar(Weight I, Weight J, const ModelParams& p) {
  p.validate();
  return detail::guard_parameter("build_rbar", [&] { return detail::build_rbar<Scalar>(I, J, p.h, p.lambda); });
}

/// Stochastic gauge: q^{ij - i'j' - Ji + Ij'} R. Unit column sums.
inline Tensor build_s(Weight I, Weight J, const ModelParams& p) {
  p.validate();
  return detail::guard_parameter("build_s", [&] { return detail::build_s<Scalar>(I, J, p.h, p.lambda); });
}

/// S assembled from products of two Phi weights; independent of r_element.
inline Tensor build_s_factorized(Weight I, Weight J, const ModelParams& p) {
  p.validate();
  return detail::guard_parameter("build_s_factorized",
                                 [&] { return detail::build_s_factorized<Scalar>(I, J, p.h, p.lambda); });
}

/// build_s / build_rbar / build_r at a point where the closed form is 0/0.
inline Tensor build_s_limit(Weight I, Weight J, const ModelParams& p) {
  p.validate();
  Laurent h(p.h);
  return detail::tensor_limit(I, J, p.lambda, [&](const Laurent& lam) { return detail::build_s(I, J, h, lam); });
}
inline Tensor build_rbar_limit(Weight I, Weight J, const ModelParams& p) {
  p.validate();
  Laurent h(p.h);
  return detail::tensor_limit(I, J, p.lambda, [&](const Laurent& lam) { return detail::build_rbar(I, J, h, lam); });
}
inline Tensor build_r_limit(Weight I, Weight J, const ModelParams& p) {
  p.validate();
  Laurent h(p.h);
  return detail::tensor_limit(I, J, p.lambda, [&](const Laurent& lam) { return detail::build_r(I, J, h, lam); });
}

enum class DegenerateKind { at_q_half_JmI, at_q_half_ImJ, at_q_half_IpJ };

inline std::string to_string(DegenerateKind k) {
  switch (k) {
    case DegenerateKind::at_q_half_JmI: return "at_q_half_JmI";
    case DegenerateKind::at_q_half_ImJ: return "at_q_half_ImJ";
    case DegenerateKind::at_q_half_IpJ: return "at_q_half_IpJ";
  }
  return "?";
}

inline DegenerateKind parse_degenerate_kind(std::string_view s) {
  for (auto k : {DegenerateKind::at_q_half_JmI, DegenerateKind::at_q_half_ImJ, DegenerateKind::at_q_half_IpJ})
    if (to_string(k) == s) return k;
  throw InvalidArgument("unknown degenerate kind '" + std::string(s) + "'");
}

/// Spectral point of each degenerate form: h^{J-I}, h^{I-J}, h^{I+J}.
inline Scalar degenerate_lambda(DegenerateKind kind, Weight I, Weight J, const Scalar& h) {
  switch (kind) {
    case DegenerateKind::at_q_half_JmI: return ipow(h, J - I);
    case DegenerateKind::at_q_half_ImJ: return ipow(h, I - J);
    case DegenerateKind::at_q_half_IpJ: return ipow(h, I + J);
  }
  throw InvalidArgument("bad degenerate kind");
}

/// Single-Phi forms of S at the three special points.
///   JmI: Phi_{q^2}(i | j'; q^{-2I}, q^{-2J})              equals S(h^{J-I}) for I <= J
///   ImJ: q^{2Ij - 2Ji'} Phi_{q^2}(j | i'; q^{-2J}, q^{-2I}) equals S(h^{I-J}) for I >= J
///   IpJ: Phi_{q^2}(i | i+j; q^{-2I}, q^{-2I-2J})           equals S(h^{I+J})
inline Tensor build_s_degenerate(DegenerateKind kind, Weight I, Weight J, const Scalar& h) {
  ModelParams{h, Scalar(1)}.validate();
  Scalar q = h * h, q2 = q * q;
  return detail::guard_parameter("build_s_degenerate", [&] {
    return detail::tabulate<Scalar>(I, J, [&](int i, int j, int ip, int jp) -> Scalar {
      switch (kind) {
        case DegenerateKind::at_q_half_JmI: return phi_weight(i, jp, ipow(q, -2 * I), ipow(q, -2 * J), q2);
        case DegenerateKind::at_q_half_ImJ:
          return ipow(q, 2 * I * j - 2 * J * ip) * phi_weight(j, ip, ipow(q, -2 * J), ipow(q, -2 * I), q2);
        case DegenerateKind::at_q_half_IpJ:
          return phi_weight(i, i + j, ipow(q, -2 * I), ipow(q, -2 * I - 2 * J), q2);
      }
      return Scalar(0);
    });
  });
}

/// Explicit L-operators S_{1,J}(x) and S_{J,1}(x), written in [z] = z - 1/z.
struct LOperators {
  Tensor s_1J;
  Tensor s_J1;
};

inline LOperators build_l_operators(Weight J, const Scalar& h, const Scalar& x) {
  ModelParams{h, x}.validate();
  Scalar q = h * h;
  return detail::guard_parameter("build_l_operators", [&] {
    Scalar D = bracket(x * ipow(h, 1 + J));
    if (D.is_zero()) throw SingularParameter("[x q^{(1+J)/2}] vanishes");
    auto qp = [&](int e) { return ipow(q, e); };
    auto delta = [](bool b) { return Scalar(b ? 1 : 0); };
    LOperators L{Tensor(1, J), Tensor(J, 1)};
    for (int j = 0; j <= J; ++j)
      for (int jp = 0; jp <= J; ++jp) {
        // S_{1,J}: first factor V_1 carries i, i'.
        if (j == jp) {
          L.s_1J.at(0, j, 0, jp) = qp(j) * bracket(x * ipow(h, 1 + J) / qp(j)) / D;
          L.s_1J.at(1, j, 1, jp) = qp(j - J) * bracket(x * ipow(h, 1 - J) * qp(j)) / D;
          L.s_J1.at(j, 0, jp, 0) = qp(-j) * bracket(x * ipow(h, 1 + J) / qp(j)) / D;
          L.s_J1.at(j, 1, jp, 1) = qp(J - j) * bracket(x * ipow(h, 1 - J) * qp(j)) / D;
        }
        if (j == jp + 1) {
          L.s_1J.at(0, j, 1, jp) = delta(true) * x * qp(j) / ipow(h, J + 1) * bracket(qp(1 + J - j)) / D;
          L.s_J1.at(j, 0, jp, 1) = ipow(h, J + 1) / qp(j) * bracket(qp(1 + J - j)) / (x * D);
        }
        if (j + 1 == jp) {
          L.s_1J.at(1, j, 0, jp) = qp(j) / ipow(h, J - 1) * bracket(qp(1 + j)) / (x * D);
          L.s_J1.at(j, 1, jp, 0) = x * ipow(h, J - 1) / qp(j) * bracket(qp(1 + j)) / D;
        }
      }
    return L;
  });
}

/// c_{i,I} = q^{i(i+1)} (q^{-2I}; q^2)_i / (q^2; q^2)_i.
inline Scalar crossing_c(int i, Weight I, const Scalar& q) {
  Scalar q2 = q * q;
  return ipow(q, i * (i + 1)) * qpoch(ipow(q, -2 * I), q2, i) / qpoch(q2, q2, i);
}

/// f_{IJ}(lambda) = q^{-IJ} (lambda^2 q^{2-I+J}; q^2)_I / (lambda^2 q^{2-I-J}; q^2)_I.
inline Scalar crossing_f(Weight I, Weight J, const Scalar& q, const Scalar& lam) {
  Scalar q2 = q * q, l2 = lam * lam;
  Scalar den = qpoch(l2 * ipow(q, 2 - I - J), q2, I);
  if (den.is_zero()) throw SingularParameter("f_IJ: denominator vanishes");
  return ipow(q, -I * J) * qpoch(l2 * ipow(q, 2 - I + J), q2, I) / den;
}

/// g_{IJ}(lambda) as the explicit ratio of four linear factors.
inline Scalar crossing_g(Weight I, Weight J, const Scalar& q, const Scalar& lam) {
  Scalar l2 = lam * lam, one(1);
  Scalar den = (one - l2 * ipow(q, 2 + I - J)) * (one - l2 * ipow(q, 2 - I + J));
  if (den.is_zero()) throw SingularParameter("g_IJ: denominator vanishes");
  return (one - l2 * ipow(q, 2 + I + J)) * (one - l2 * ipow(q, 2 - I - J)) / den;
}

struct CrossingData {
  Matrix<Scalar> V;  // V_{i,j} = c_{i,I} delta_{I-i,j}
  Matrix<Scalar> M;  // diag(1, q^2, ..., q^{2I})
  Scalar f;
  Scalar g;
};

inline Matrix<Scalar> twist_m(Weight I, const Scalar& q) {
  std::vector<Scalar> d;
  for (int i = 0; i <= I; ++i) d.push_back(ipow(q, 2 * i));
  return Matrix<Scalar>::diagonal(d);
}

inline CrossingData build_crossing(Weight I, Weight J, const ModelParams& p) {
  p.validate();
  Scalar q = p.q();
  CrossingData c;
  c.V = Matrix<Scalar>(I + 1, I + 1);
  for (int i = 0; i <= I; ++i) c.V(i, I - i) = crossing_c(i, I, q);
  c.M = twist_m(I, q);
  c.f = crossing_f(I, J, q, p.lambda);
  c.g = crossing_g(I, J, q, p.lambda);
  return c;
}

/// Dual operator of the dual reflection equation, as a function of lambda = x/y,
/// by exact inversion: [ (R_21^{t1})^{-1} ]^{t1} with R_21 = P S_{J,I}(1/lambda) P.
inline Tensor build_dual_r_inversion(Weight I, Weight J, const Scalar& h, const Scalar& lambda) {
  ModelParams{h, lambda}.validate();
  Tensor r21 = build_s(J, I, {h, lambda.inverse()}).swapped();
  Matrix<Scalar> inv = r21.partial_transpose_first().matrix().inverse();
  return Tensor(I, J, std::move(inv)).partial_transpose_first();
}

/// Same operator from the crossing-unitarity shift:
/// g_IJ(lambda/q^2)^{-1} M_1^{-1} S_IJ(lambda/q^2) M_1.
inline Tensor build_dual_r_conjugation(Weight I, Weight J, const Scalar& h, const Scalar& lambda) {
  ModelParams{h, lambda}.validate();
  Scalar q = h * h, shifted = lambda / (q * q);
  Scalar g = crossing_g(I, J, q, shifted);
  if (g.is_zero()) throw SingularParameter("g_IJ vanishes at the shifted point");
  Tensor s = build_s(I, J, {h, shifted});
  Tensor out(I, J);
  for (int i = 0; i <= I; ++i)
    for (int j = 0; j <= J; ++j)
      for (int ip = 0; ip <= I; ++ip)
        for (int jp = 0; jp <= J; ++jp)
          out.at(i, j, ip, jp) = ipow(q, 2 * (ip - i)) * s.at(i, j, ip, jp) / g;
  return out;
}

/// Dual operator at (x, y). Both construction routes are evaluated and must agree;
/// the inversion-route value is returned.
inline Tensor build_dual_r(Weight I, Weight J, const Scalar& h, const Scalar& x, const Scalar& y) {
  if (y.is_zero()) throw InvalidArgument("y must be nonzero");
  Scalar lambda = x / y;
  Tensor inv = build_dual_r_inversion(I, J, h, lambda);
  if (!(inv == build_dual_r_conjugation(I, J, h, lambda)))
    throw Error("dual operator: inversion and conjugation routes disagree");
  return inv;
}

// JSON

inline nlohmann::json tensor_to_json(const Tensor& t, const Scalar& lambda, const Scalar& h) {
  int I = t.first_weight(), J = t.second_weight();
  nlohmann::json entries = nlohmann::json::array();
  for (int i = 0; i <= I; ++i)
    for (int j = 0; j <= J; ++j)
      for (int ip = 0; ip <= I; ++ip)
        for (int jp = 0; jp <= J; ++jp) {
          if (i + j != ip + jp) continue;
          entries.push_back({{"idx", {i, j, ip, jp}}, {"val", t.at(i, j, ip, jp).str()}});
        }
  return {{"weights", {I, J}}, {"lambda", lambda.str()}, {"h", h.str()}, {"entries", entries}};
}

inline Tensor tensor_from_json(const nlohmann::json& js) {
  try {
    int I = js.at("weights").at(0).get<int>(), J = js.at("weights").at(1).get<int>();
    Tensor t{Weight(I), Weight(J)};
    for (const auto& e : js.at("entries")) {
      const auto& idx = e.at("idx");
      std::array<int, 4> k{idx.at(0).get<int>(), idx.at(1).get<int>(), idx.at(2).get<int>(), idx.at(3).get<int>()};
      if (k[0] < 0 || k[0] > I || k[2] < 0 || k[2] > I || k[1] < 0 || k[1] > J || k[3] < 0 || k[3] > J)
        throw InvalidArgument("tensor JSON: index out of range");
      t.at(k[0], k[1], k[2], k[3]) = Scalar::parse(e.at("val").get<std::string>());
    }
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("tensor JSON: ") + e.what());
  }
}

}  // namespace hsv
