#include <gtest/gtest.h>

#include "hsv/identities.hpp"
#include "hsv/laurent.hpp"
#include "hsv/qseries.hpp"
#include "hsv/report.hpp"

using hsv::Scalar;

namespace {

// Oracles written from the definitions, sharing nothing with the library.
Scalar naive_qpoch(const Scalar& a, const Scalar& q, int n) {
  if (n == 0) return Scalar(1);
  Scalar qp(1);
  for (int i = 0; i < n - 1; ++i) qp = qp * q;
  return naive_qpoch(a, q, n - 1) * (Scalar(1) - a * qp);
}

Scalar pascal_qbinom(int n, int m, const Scalar& q) {
  if (m < 0 || m > n) return Scalar(0);
  if (m == 0 || m == n) return Scalar(1);
  Scalar qm(1);
  for (int i = 0; i < m; ++i) qm = qm * q;
  return pascal_qbinom(n - 1, m - 1, q) + qm * pascal_qbinom(n - 1, m, q);
}

// Sum by consecutive term ratios.
Scalar ratio_series(const std::vector<Scalar>& nums, const std::vector<Scalar>& dens, const Scalar& q, const Scalar& x,
                    int kmax) {
  Scalar term(1), sum(1), qk(1);
  for (int k = 0; k < kmax; ++k) {
    Scalar r = x / (Scalar(1) - qk * q);
    for (const auto& a : nums) r = r * (Scalar(1) - a * qk);
    for (const auto& b : dens) r = r / (Scalar(1) - b * qk);
    term = term * r;
    sum = sum + term;
    qk = qk * q;
  }
  return sum;
}

}  // namespace

TEST(QPochhammer, SmallValues) {
  EXPECT_EQ(hsv::qpoch(Scalar(2), Scalar(2), 2), Scalar(3));
  EXPECT_EQ(hsv::qpoch(Scalar(5, 3), Scalar(1, 2), 0), Scalar(1));
  EXPECT_EQ(hsv::qpoch(Scalar(1), Scalar(3), 4), Scalar(0));
  EXPECT_THROW(hsv::qpoch(Scalar(1), Scalar(3), -1), hsv::InvalidArgument);
}

TEST(QPochhammer, MatchesRecursiveDefinition) {
  hsv::Sampler s(11);
  for (int trial = 0; trial < 30; ++trial) {
    Scalar a = s.rational(), q = s.generic();
    for (int n = 0; n <= 6; ++n) EXPECT_EQ(hsv::qpoch(a, q, n), naive_qpoch(a, q, n));
  }
}

TEST(QPochhammer, SplitsAtAnyIndex) {
  hsv::Sampler s(12);
  for (int trial = 0; trial < 30; ++trial) {
    Scalar a = s.rational(), q = s.generic();
    for (int m = 0; m <= 4; ++m)
      for (int n = 0; n <= 4; ++n)
        EXPECT_EQ(hsv::qpoch(a, q, m + n), hsv::qpoch(a, q, m) * hsv::qpoch(a * hsv::ipow(q, m), q, n));
  }
}

TEST(QPochhammer, VectorFormIsAProduct) {
  Scalar q(2, 5);
  std::vector<Scalar> as{Scalar(1, 3), Scalar(-4), Scalar(7, 2)};
  EXPECT_EQ(hsv::qpoch(as, q, 3), hsv::qpoch(as[0], q, 3) * hsv::qpoch(as[1], q, 3) * hsv::qpoch(as[2], q, 3));
}

TEST(QBinomial, MatchesQPascal) {
  hsv::Sampler s(13);
  for (int trial = 0; trial < 20; ++trial) {
    Scalar q = s.generic();
    for (int n = 0; n <= 7; ++n)
      for (int m = -1; m <= n + 1; ++m) EXPECT_EQ(hsv::qbinom(n, m, q), pascal_qbinom(n, m, q));
  }
  EXPECT_EQ(hsv::qbinom(2, 1, Scalar(3)), Scalar(4));
}

TEST(QBinomial, FiniteBinomialTheorem) {
  // sum_k [n,k] q^{k(k-1)/2} z^k = (-z; q)_n
  hsv::Sampler s(14);
  for (int trial = 0; trial < 20; ++trial) {
    Scalar q = s.generic(), z = s.rational();
    for (int n = 0; n <= 6; ++n) {
      Scalar sum;
      for (int k = 0; k <= n; ++k) sum += hsv::qbinom(n, k, q) * hsv::ipow(q, k * (k - 1) / 2) * hsv::ipow(z, k);
      EXPECT_EQ(sum, hsv::qpoch(-z, q, n));
    }
  }
}

TEST(PhiSeries, MatchesTermRatioSum) {
  hsv::Sampler s(15);
  for (int trial = 0; trial < 30; ++trial) {
    Scalar q = s.generic(), x = s.rational();
    std::vector<Scalar> nums{s.rational(), s.rational(), s.rational()}, dens{s.generic(), s.generic()};
    int kmax = s.integer(0, 5);
    try {
      EXPECT_EQ(hsv::phi_terminating(nums, dens, q, x, kmax), ratio_series(nums, dens, q, x, kmax));
    } catch (const hsv::Singular&) {
    }
  }
}

TEST(PhiSeries, TerminatesOnNegativePowerNumerator) {
  // (q^{-n}; q)_k = 0 for k > n, so summing past n changes nothing.
  Scalar q(2, 3), x(5, 7);
  std::vector<Scalar> nums{hsv::ipow(q, -2), Scalar(3)}, dens{Scalar(1, 5)};
  EXPECT_EQ(hsv::phi_terminating(nums, dens, q, x, 2), hsv::phi_terminating(nums, dens, q, x, 6));
}

TEST(PhiSeries, VanishingDenominatorThrows) {
  Scalar q(1, 2);
  std::vector<Scalar> nums{Scalar(3)}, dens{Scalar(2)};  // (2; 1/2)_2 = (1-2)(1-1) = 0
  EXPECT_THROW(hsv::phi_terminating(nums, dens, q, Scalar(1), 3), hsv::Singular);
}

TEST(PhiWeight, IsAProbabilityDistribution) {
  hsv::Sampler s(16);
  for (int trial = 0; trial < 30; ++trial) {
    Scalar x = s.generic(), y = s.generic(), q = s.generic();
    for (int beta = 0; beta <= 5; ++beta) {
      Scalar sum;
      for (int g = 0; g <= beta; ++g) sum += hsv::phi_weight(g, beta, x, y, q);
      EXPECT_EQ(sum, Scalar(1));
    }
  }
}

TEST(PhiWeight, SupportAndEdgeValues) {
  Scalar x(2, 3), y(5, 4), q(1, 3);
  EXPECT_EQ(hsv::phi_weight(0, 0, x, y, q), Scalar(1));
  EXPECT_EQ(hsv::phi_weight(-1, 3, x, y, q), Scalar(0));
  EXPECT_EQ(hsv::phi_weight(4, 3, x, y, q), Scalar(0));
  // beta = 1: Phi(1|1) = (y/x)(1-x)/(1-y).
  EXPECT_EQ(hsv::phi_weight(1, 1, x, y, q), (y / x) * (Scalar(1) - x) / (Scalar(1) - y));
  EXPECT_THROW(hsv::phi_weight(0, -1, x, y, q), hsv::InvalidArgument);
}

TEST(Bracket, OddUnderInversion) {
  Scalar z(7, 3);
  EXPECT_EQ(hsv::bracket(z.inverse()), -hsv::bracket(z));
  EXPECT_EQ(hsv::bracket(Scalar(1)), Scalar(0));
}

TEST(QPochhammer, WorksOverLaurentSeries) {
  Scalar q(1, 2);
  hsv::Laurent a = hsv::Laurent::perturbed(Scalar(4), 8);  // a -> 4 = q^{-2}
  // (a; q)_3 has a simple zero at a = q^{-2}; (a; q)_3 / (1 - a q^2) -> (1-4)(1-2).
  hsv::Laurent num = hsv::qpoch(a, hsv::Laurent(q), 3);
  hsv::Laurent den = hsv::Laurent(1) - a * hsv::Laurent(q * q);
  EXPECT_EQ((num / den).limit(), Scalar(-3) * Scalar(-1));
}

class QSeriesIdentityTest : public ::testing::TestWithParam<hsv::QSeriesIdentity> {};

TEST_P(QSeriesIdentityTest, ExactOnRandomDraws) {
  hsv::Sampler s(hsv::derive_seed(2024, static_cast<std::uint64_t>(GetParam())));
  int passed = 0;
  for (int trial = 0; trial < 60 && passed < 50; ++trial) {
    hsv::Draw d = hsv::sample_qseries_draw(GetParam(), s);
    try {
      hsv::Report r = hsv::check_qseries_identity(GetParam(), d);
      EXPECT_TRUE(r.passed()) << r.identity << " residual " << r.max_abs_residual;
      ++passed;
    } catch (const hsv::Singular&) {
    }
  }
  EXPECT_GE(passed, 50);
}

INSTANTIATE_TEST_SUITE_P(All, QSeriesIdentityTest, ::testing::ValuesIn(hsv::kAllQSeriesIdentities),
                         [](const auto& info) { return hsv::to_string(info.param); });

TEST(QSeriesIdentity, NamesRoundTrip) {
  for (auto k : hsv::kAllQSeriesIdentities) EXPECT_EQ(hsv::parse_qseries_identity(hsv::to_string(k)), k);
  EXPECT_THROW(hsv::parse_qseries_identity("nope"), hsv::InvalidArgument);
}

TEST(QSeriesIdentity, QVandermondeAtHandValues) {
  // n = 1, a = 3, c = 5, q = 1/2: both sides equal 1/2.
  hsv::Draw d;
  d.set("q", Scalar(1, 2)).set("n", Scalar(1)).set("a", Scalar(3)).set("b", Scalar(3)).set("c", Scalar(5))
      .set("d", Scalar(1)).set("e", Scalar(1)).set("z", Scalar(1));
  EXPECT_TRUE(hsv::check_qseries_identity(hsv::QSeriesIdentity::qvandermonde, d).passed());
}
