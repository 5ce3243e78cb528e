#pragma once

// Reference N-matrices for spin 1 and 2, written out as literal rational
// expressions in (q, y, t, nu). Deliberately avoids the q-series helpers so it
// can serve as an independent oracle for n_closed.

#include "hsv/boundary.hpp"

namespace hsv::golden {

inline NMatrix n_spin1(const Scalar& h, const Scalar& y, const Scalar& t, const Scalar& nu) {
  Scalar q = h * h, y2 = y * y, y4 = y2 * y2, one(1);
  Scalar D = (y2 - nu * q * t * t) * (one + nu * q * y2);
  NMatrix N(1);
  N(0, 0) = y2 * (one + nu * q * y2 - nu * q * t * t * (nu * q + y2)) / D;
  N(0, 1) = -nu * t * (one - y4) / (q * D);
  N(1, 0) = N(0, 1);
  N(1, 1) = (nu * q + y2 - nu * q * t * t * (one + nu * q * y2)) / (q * q * q * q * D);
  return N;
}

inline NMatrix n_spin2(const Scalar& h, const Scalar& y, const Scalar& t, const Scalar& nu) {
  Scalar q = h * h, q2 = q * q, q4 = q2 * q2, y2 = y * y, y4 = y2 * y2, t2 = t * t, t4 = t2 * t2, one(1);
  Scalar a = nu * t2 / y2, b = -nu * y2;
  Scalar D = (one - a) * (one - a * q2) * (one - b) * (one - b * q2);
  NMatrix N(2);
  N(0, 0) = (nu * t2 * (y2 + nu * q2) * (nu * q2 * t2 * (nu + y2) - (one + q2) * (one + nu * y2)) +
             (one + nu * y2) * (one + nu * q2 * y2)) /
            D;
  N(0, 1) = nu * t / (q2 * y2) * (one - y4) * (one + q2) * (nu * t2 * (y2 + nu * q2) - one - nu * y2) / D;
  N(0, 2) = nu * nu * t2 / (q4 * y4) * (one - y4) * (q2 - y4) / D;
  N(1, 1) = (one + q2) / (q4 * q2) +
            nu * (one + q2) * (one - y4) *
                (q2 * y2 * (one + nu * y2) + t2 * (nu * q2 + y2) * (one - nu * q2 * y2) - nu * q2 * t4 * (one + nu * y2)) /
                (q4 * q2 * y4 * D);
  N(1, 2) = nu * t / (q4 * q4 * y4) * (one + q2) * (one - y4) * (nu * q2 * t2 * (one + nu * y2) - y2 - nu * q2) / D;
  N(2, 2) = ((nu + y2) * (nu * q2 + y2) - nu * t2 * (one + q2) * (nu * q2 + y2) * (one + nu * y2) +
             nu * nu * q2 * t4 * (one + nu * y2) * (one + nu * q2 * y2)) /
            (q4 * q4 * q2 * y4 * D);
  N(1, 0) = N(0, 1);
  N(2, 0) = N(0, 2);
  N(2, 1) = N(1, 2);
  return N;
}

/// Fixed draws (h, y, t, nu) used by the golden comparison.
struct GoldenDraw {
  Scalar h, y, t, nu;
};

inline std::vector<GoldenDraw> fixed_draws() {
  return {
      {Scalar(1, 2), Scalar(3, 2), Scalar(2, 3), Scalar(1, 5)},
      {Scalar(2, 3), Scalar(5, 7), Scalar(-3, 4), Scalar(7, 3)},
      {Scalar(3, 5), Scalar(-4, 3), Scalar(5, 2), Scalar(-2, 9)},
      {Scalar(-5, 4), Scalar(2, 9), Scalar(1, 7), Scalar(11, 6)},
      {Scalar(7, 9), Scalar(6, 5), Scalar(-8, 3), Scalar(-3, 13)},
  };
}

}  // namespace hsv::golden
