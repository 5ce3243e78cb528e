#include <gtest/gtest.h>

#include "hsv/verify.hpp"

using hsv::BoundaryParams;
using hsv::KRoute;
using hsv::Scalar;

namespace {

BoundaryParams sample(std::uint64_t seed) {
  hsv::Sampler s(seed);
  return BoundaryParams::from_t(s.generic(), s.generic(), s.generic(), s.generic());
}

}  // namespace

TEST(Ybe, ThreeArbitraryWeights) {
  EXPECT_TRUE(hsv::check_ybe(1, 1, 1, Scalar(2, 3), Scalar(-5, 7), Scalar(11, 4), Scalar(1, 2)).passed());
  EXPECT_TRUE(hsv::check_ybe(1, 2, 3, Scalar(2, 3), Scalar(-5, 7), Scalar(11, 4), Scalar(3, 5)).passed());
}

TEST(Ybe, EqualSpectralPointsAreRegular) {
  // x = y puts R12 at the permutation point: the direct builder rejects it and
  // the limit builder supplies P, for which the relation holds trivially.
  Scalar h(1, 2), x(2), z(3);
  EXPECT_THROW(hsv::check_ybe(1, 1, 1, x, x, z, h), hsv::Singular);
  hsv::ProductSpace sp({3, 3, 2});
  auto R12 = sp.embed(hsv::build_s_limit(2, 2, {h, Scalar(1)}).matrix(), 0, 1);
  auto R13 = sp.embed(hsv::build_s(2, 1, {h, x / z}).matrix(), 0, 2);
  auto R23 = sp.embed(hsv::build_s(2, 1, {h, x / z}).matrix(), 1, 2);
  EXPECT_EQ(R12 * R13 * R23, R23 * R13 * R12);
}

TEST(Ybe, WrongSpectralOrderFails) {
  // Swapping the arguments of R13 breaks the relation.
  Scalar h(1, 2), x(2, 3), y(-5, 7), z(11, 4);
  hsv::ProductSpace sp({2, 2, 2});
  auto S = [&](const Scalar& l) { return hsv::build_s(1, 1, {h, l}).matrix(); };
  auto R12 = sp.embed(S(x / y), 0, 1), R13 = sp.embed(S(z / x), 0, 2), R23 = sp.embed(S(y / z), 1, 2);
  EXPECT_NE(R12 * R13 * R23, R23 * R13 * R12);
}

TEST(Reflection, SpinOneHalfWithEveryRoute) {
  auto p = sample(5);
  auto pf = p;
  pf.t.reset();
  pf.t_plus = Scalar(3, 7);
  pf.t_minus = Scalar(-2, 5);
  for (KRoute r : {KRoute::half, KRoute::recurrence}) EXPECT_TRUE(hsv::check_reflection(1, 1, Scalar(4, 3), Scalar(-6, 5), pf, r).passed());
  for (KRoute r : {KRoute::closed_form, KRoute::upper, KRoute::lower})
    for (int J = 1; J <= 3; ++J)
      EXPECT_TRUE(hsv::check_reflection(1, J, Scalar(4, 3), Scalar(-6, 5), p, r).passed()) << hsv::to_string(r) << J;
}

TEST(Reflection, EqualHigherWeights) {
  auto p = sample(6);
  EXPECT_TRUE(hsv::check_reflection(2, 2, Scalar(5, 2), Scalar(-3, 7), p, KRoute::closed_form).passed());
}

TEST(Reflection, MixedHigherWeightsAreExploratory) {
  auto p = sample(7);
  hsv::Report r = hsv::check_reflection(2, 3, Scalar(5, 2), Scalar(-3, 7), p, KRoute::closed_form);
  EXPECT_TRUE(r.exploratory);
  EXPECT_FALSE(hsv::check_reflection(1, 3, Scalar(5, 2), Scalar(-3, 7), p, KRoute::closed_form).exploratory);
  EXPECT_FALSE(hsv::check_reflection(2, 2, Scalar(5, 2), Scalar(-3, 7), p, KRoute::closed_form).exploratory);
}

TEST(Reflection, MismatchedConstantsFail) {
  auto p = sample(8), other = sample(9);
  Scalar x(4, 3), y(-6, 5);
  auto KI = hsv::build_k(KRoute::closed_form, 1, p.at_y(x));
  auto KJ = hsv::build_k(KRoute::closed_form, 2, other.at_y(y));
  EXPECT_FALSE(hsv::reflection_residual(1, 2, p.h, x, y, KI, KJ).is_zero());
}

TEST(Reflection, SpinMismatchRejected) {
  auto p = sample(10);
  auto K1 = hsv::build_k(KRoute::closed_form, 1, p);
  EXPECT_THROW(hsv::reflection_residual(1, 2, p.h, Scalar(2), Scalar(3), K1, K1), hsv::InvalidArgument);
}

TEST(DualReflection, HoldsWithReflectedK) {
  auto p = sample(11);
  EXPECT_TRUE(hsv::check_dual_reflection(1, 1, Scalar(7, 2), Scalar(-2, 9), p, KRoute::closed_form).passed());
  EXPECT_TRUE(hsv::check_dual_reflection(1, 2, Scalar(7, 2), Scalar(-2, 9), p, KRoute::closed_form).passed());
  EXPECT_TRUE(hsv::check_dual_reflection(1, 2, Scalar(7, 2), Scalar(-2, 9), p, KRoute::upper).passed());
}

TEST(DualReflection, UnreflectedKFails) {
  auto p = sample(12);
  Scalar x(7, 2), y(-2, 9);
  auto K1 = hsv::build_k(KRoute::closed_form, 1, p.at_y(x));
  auto K2 = hsv::build_k(KRoute::closed_form, 1, p.at_y(y));
  EXPECT_FALSE(hsv::dual_reflection_residual(1, 1, p.h, x, y, K1, K2).is_zero());
}

TEST(Transfer, CommutesForInhomogeneousChains) {
  hsv::TransferConfig c;
  c.site_weights = {1, 1};
  c.z = {Scalar(3, 2), Scalar(-5, 3)};
  c.x = Scalar(7, 4);
  c.y = Scalar(-2, 5);
  c.boundary = sample(13);
  c.dual_boundary = sample(14);
  c.dual_boundary.h = c.boundary.h;
  EXPECT_TRUE(hsv::check_transfer_commute(c).passed());
  c.site_weights = {2};
  c.z = {Scalar(5, 6)};
  EXPECT_TRUE(hsv::check_transfer_commute(c).passed());
}

TEST(Transfer, MismatchedBoundaryBreaksCommutation) {
  // K from one family at x and another at y: the two transfer matrices no longer commute.
  hsv::TransferConfig a;
  a.site_weights = {1, 1};
  a.z = {Scalar(3, 2), Scalar(-5, 3)};
  a.boundary = sample(15);
  a.dual_boundary = sample(16);
  a.dual_boundary.h = a.boundary.h;
  hsv::TransferConfig b = a;
  b.boundary = sample(17);
  b.boundary.h = a.boundary.h;
  auto ta = hsv::transfer_matrix(1, Scalar(7, 4), a);
  auto tb = hsv::transfer_matrix(1, Scalar(-2, 5), b);
  EXPECT_NE(ta * tb, tb * ta);
}

TEST(Transfer, RejectsBadConfig) {
  hsv::TransferConfig c;
  c.site_weights = {1, 1};
  c.z = {Scalar(2)};
  c.boundary = c.dual_boundary = sample(18);
  EXPECT_THROW(hsv::check_transfer_commute(c), hsv::InvalidArgument);
}

TEST(Crossing, AllRelationsAtOneDraw) {
  for (int I = 1; I <= 3; ++I)
    for (int J = 1; J <= 3; ++J) EXPECT_TRUE(hsv::check_crossing(I, J, Scalar(2, 5), Scalar(-7, 3)).passed()) << I << J;
}

TEST(PhiIdentity, TrivialIndicesGiveOne) {
  Scalar q2 = hsv::ipow(Scalar(2, 3), 4);
  Scalar x(3), y(5, 2), z(-1, 3), u(7), v(2, 9);
  EXPECT_EQ(hsv::detail::phi_identity_lhs(0, 0, 0, 0, x, y, z, u, v, q2), Scalar(1));
  EXPECT_EQ(hsv::detail::phi_identity_rhs(0, 0, 0, 0, x, y, z, u, v, q2), Scalar(1));
}

TEST(PhiIdentity, HoldsUpToIndexThree) {
  hsv::Sampler s(19);
  for (int trial = 0; trial < 2; ++trial)
    EXPECT_TRUE(hsv::check_degenerate_reflection(s.generic(), s.generic(), s.generic(), s.generic(), s.generic(),
                                                 s.generic(), 3)
                    .passed());
}

TEST(PhiIdentity, SwappedFreePointsFail) {
  // Exchanging the roles of the two free dual points breaks the identity.
  Scalar q2 = hsv::ipow(Scalar(2, 3), 4);
  Scalar x(3), y(5, 2), z(-1, 3), u(7), v(2, 9);
  bool all_equal = true;
  for (int al = 0; al <= 2; ++al)
    for (int ga = 0; ga <= 2; ++ga)
      all_equal = all_equal && hsv::detail::phi_identity_lhs(al, 1, ga, 1, x, y, z, v, u, q2) ==
                                   hsv::detail::phi_identity_rhs(al, 1, ga, 1, x, y, z, u, v, q2);
  EXPECT_FALSE(all_equal);
}

TEST(PhiIdentity, MatrixLevelTruncation) {
  EXPECT_TRUE(hsv::check_degenerate_reflection_matrix(Scalar(2, 3), Scalar(3), Scalar(5, 2), Scalar(2, 9), Scalar(7),
                                                      Scalar(-1, 3), 4)
                  .passed());
}

TEST(KDefining, EveryRoute) {
  auto p = sample(20);
  EXPECT_TRUE(hsv::check_k_defining(3, p, KRoute::closed_form).passed());
  EXPECT_TRUE(hsv::check_k_defining(2, p, KRoute::upper).passed());
  EXPECT_TRUE(hsv::check_k_defining(2, p, KRoute::lower).passed());
  auto pf = p;
  pf.t.reset();
  pf.t_plus = Scalar(4, 3);
  pf.t_minus = Scalar(2, 7);
  EXPECT_TRUE(hsv::check_k_defining(2, pf, KRoute::recurrence).passed());
}

TEST(Routes, AllSpins) {
  for (int J = 1; J <= 4; ++J) EXPECT_TRUE(hsv::check_routes(J, sample(30 + J), Scalar(5, 3)).passed()) << J;
}

TEST(Routes, NamesRoundTrip) {
  for (KRoute r : {KRoute::half, KRoute::recurrence, KRoute::closed_form, KRoute::upper, KRoute::lower})
    EXPECT_EQ(hsv::parse_k_route(hsv::to_string(r)), r);
  EXPECT_EQ(hsv::parse_k_route("closed"), KRoute::closed_form);
  EXPECT_THROW(hsv::parse_k_route("diag"), hsv::InvalidArgument);
  EXPECT_THROW(hsv::build_k(KRoute::half, 2, sample(1)), hsv::InvalidArgument);
}

TEST(Suite, UnknownIdIsUsageError) {
  EXPECT_THROW(hsv::run_suite("nope", 1, 1), hsv::InvalidArgument);
  EXPECT_THROW(hsv::run_suite("ybe", 1, -1), hsv::InvalidArgument);
}

TEST(Suite, ZeroTrialsIsEmpty) {
  auto r = hsv::run_suite("ybe", 1, 0);
  EXPECT_TRUE(r.trials.empty());
  EXPECT_TRUE(r.ok());
}

TEST(Suite, ReproducibleFromSeed) {
  auto a = hsv::suite_to_json(hsv::run_suite("reflection", 42, 6), false);
  auto b = hsv::suite_to_json(hsv::run_suite("reflection", 42, 6), false);
  auto c = hsv::suite_to_json(hsv::run_suite("reflection", 43, 6), false);
  EXPECT_EQ(a.dump(), b.dump());
  EXPECT_NE(a.dump(), c.dump());
}

TEST(Suite, JsonShape) {
  auto js = hsv::suite_to_json(hsv::run_suite("ybe", 1, 3));
  EXPECT_EQ(js["suite"], "ybe");
  EXPECT_EQ(js["seed"], 1);
  ASSERT_EQ(js["trials"].size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& t = js["trials"][i];
    EXPECT_EQ(t["id"], i);
    EXPECT_EQ(t["status"], "pass");
    EXPECT_EQ(t["residual"], "0");
    EXPECT_TRUE(t["params"].is_object());
    EXPECT_TRUE(t.contains("ms"));
  }
  EXPECT_EQ(js["summary"]["pass"], 3);
  EXPECT_EQ(js["summary"]["fail"], 0);
}

class SuiteSmoke : public ::testing::TestWithParam<std::string_view> {};

TEST_P(SuiteSmoke, EveryTrialPasses) {
  auto r = hsv::run_suite(GetParam(), 7, 4);
  ASSERT_EQ(r.trials.size(), 4u);
  for (const auto& t : r.trials) EXPECT_TRUE(t.passed() || t.exploratory) << t.identity << " " << t.max_abs_residual;
  EXPECT_TRUE(r.ok());
}

INSTANTIATE_TEST_SUITE_P(All, SuiteSmoke, ::testing::ValuesIn(hsv::kSuites),
                         [](const auto& info) { return std::string(info.param); });

TEST(Suite, RoutesSeedSevenCoversSpinsOneToFour) {
  auto r = hsv::run_suite("routes", 7, 10);
  EXPECT_EQ(r.count(hsv::Status::pass, false), 10);
}
