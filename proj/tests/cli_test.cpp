#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <string>

#include "json.hpp"

#include "hsv/boundary.hpp"
#include "hsv/lattice.hpp"

using nlohmann::json;

namespace {

struct CliRun {
  int code;
  std::string out;
};

CliRun run(const std::string& args, const std::string& env = "") {
  std::string cmd = env + " " + HSV_CLI_PATH + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, ""};
  std::string out;
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

}  // namespace

TEST(CliRmat, StochasticSpinHalfHasUnitColumnSums) {
  CliRun r = run("rmat --weights 1 1 --lambda 3/2 --h 1/2 --gauge stochastic");
  ASSERT_EQ(r.code, 0);
  auto t = hsv::tensor_from_json(json::parse(r.out));
  const auto& m = t.matrix();
  ASSERT_EQ(m.rows(), 4u);
  for (std::size_t c = 0; c < 4; ++c) {
    hsv::Scalar s;
    for (std::size_t k = 0; k < 4; ++k) s += m(k, c);
    EXPECT_EQ(s, hsv::Scalar(1));
  }
}

TEST(CliRmat, FactorizedAndStochasticEntriesIdentical) {
  CliRun a = run("rmat --weights 2 3 --lambda -5/7 --h 2/3 --gauge stochastic");
  CliRun b = run("rmat --weights 2 3 --lambda -5/7 --h 2/3 --gauge factorized");
  ASSERT_EQ(a.code, 0);
  ASSERT_EQ(b.code, 0);
  EXPECT_EQ(a.out, b.out);
}

TEST(CliRmat, EveryGaugeRoundTrips) {
  for (const char* g : {"plain", "symmetric", "stochastic", "factorized", "degenerate:at_q_half_IpJ",
                        "degenerate:at_q_half_JmI", "degenerate:at_q_half_ImJ"}) {
    CliRun r = run(std::string("rmat --weights 1 2 --lambda 5/3 --h 1/3 --gauge ") + g);
    ASSERT_EQ(r.code, 0) << g;
    auto js = json::parse(r.out);
    EXPECT_EQ(hsv::tensor_from_json(js), hsv::tensor_from_json(json::parse(js.dump()))) << g;
  }
}

TEST(CliRmat, UsageErrors) {
  EXPECT_EQ(run("rmat --weights 0 1 --h 1/2").code, 64);
  EXPECT_EQ(run("rmat --weights 1 1 --h 1/x").code, 64);
  EXPECT_EQ(run("rmat --weights 1 1 --h 1/2 --gauge sideways").code, 64);
  EXPECT_EQ(run("rmat --weights 1 --h 1/2").code, 64);
  EXPECT_EQ(run("").code, 64);
  EXPECT_EQ(run("bogus").code, 64);
}

TEST(CliRmat, SingularParameterExitCode) {
  EXPECT_EQ(run("rmat --weights 1 1 --lambda 1 --h 1/2").code, 2);
}

TEST(CliKmat, ClosedRouteIsStochasticAndChecked) {
  CliRun r = run("kmat --spin 2 --route closed --mu 1 --h 1/2 --y 3/2 --t 2/3 --nu 1/5 --check");
  ASSERT_EQ(r.code, 0);
  auto js = json::parse(r.out);
  EXPECT_EQ(js["check"]["status"], "pass");
  EXPECT_EQ(js["check"]["residual"], "0");
  EXPECT_TRUE(js["check"]["stochastic"].get<bool>());
  EXPECT_TRUE(hsv::kmatrix_from_json(js).is_stochastic());
}

TEST(CliKmat, RecurrenceEqualsClosedAtSpinOne) {
  CliRun a = run("kmat --spin 1 --route recurrence --h 2/3 --y 5/7 --t -3/4 --nu 7/3");
  CliRun b = run("kmat --spin 1 --route closed --h 2/3 --y 5/7 --t -3/4 --nu 7/3");
  ASSERT_EQ(a.code, 0);
  ASSERT_EQ(b.code, 0);
  EXPECT_EQ(json::parse(a.out)["entries"], json::parse(b.out)["entries"]);
}

TEST(CliKmat, TriangularRoutesForbidTheOtherConstant) {
  EXPECT_EQ(run("kmat --spin 2 --route upper --t-plus 1/3 --h 1/2 --y 3/2 --nu 1/5").code, 64);
  EXPECT_EQ(run("kmat --spin 2 --route lower --t-minus 1/3 --h 1/2 --y 3/2 --nu 1/5").code, 64);
  CliRun up = run("kmat --spin 2 --route upper --h 1/2 --y 3/2 --nu 1/5 --check");
  ASSERT_EQ(up.code, 0);
  auto K = hsv::kmatrix_from_json(json::parse(up.out));
  EXPECT_TRUE(K(1, 0).is_zero());
  EXPECT_TRUE(K(2, 1).is_zero());
}

TEST(CliKmat, UsageErrors) {
  EXPECT_EQ(run("kmat --spin 1 --route closed --h 1/2 --y 3/2 --nu 1/5").code, 64);  // no --t
  EXPECT_EQ(run("kmat --spin 2 --route half --h 1/2 --y 3/2 --nu 1/5 --t 2").code, 64);
  EXPECT_EQ(run("kmat --spin 1 --route sideways --h 1/2 --y 3/2 --nu 1/5 --t 2").code, 64);
  EXPECT_EQ(run("kmat --spin 1 --route recurrence --h 1/2 --y 3/2 --nu 1/5 --t 2 --t-plus 3").code, 64);
}

TEST(CliGenfun, MatchesLibraryAndPasses) {
  CliRun r = run("genfun --spin 2 --h 1/2 --y 3/2 --t 2/3 --nu 1/5 --u 2 --v 5/3");
  ASSERT_EQ(r.code, 0);
  auto js = json::parse(r.out);
  EXPECT_EQ(js["status"], "pass");
  auto p = hsv::BoundaryParams::from_t(hsv::Scalar(1, 2), hsv::Scalar(2, 3), hsv::Scalar(1, 5), hsv::Scalar(3, 2));
  EXPECT_EQ(js["value"], hsv::genfun_eval(hsv::Scalar(2), hsv::Scalar(5, 3), 2, p).value.str());
}

TEST(CliVerify, TransferSuitePasses) { EXPECT_EQ(run("verify --suite transfer --seed 1 --trials 5").code, 0); }

TEST(CliVerify, PhiIdentitySuitePasses) {
  EXPECT_EQ(run("verify --suite phi_identity --max-index 3 --trials 2").code, 0);
}

TEST(CliVerify, ZeroTrialsGivesEmptyList) {
  CliRun r = run("verify --suite ybe --trials 0");
  ASSERT_EQ(r.code, 0);
  auto js = json::parse(r.out);
  EXPECT_TRUE(js["trials"].empty());
  EXPECT_EQ(js["summary"]["pass"], 0);
}

TEST(CliVerify, UnknownSuiteIsUsageError) { EXPECT_EQ(run("verify --suite nope").code, 64); }

TEST(CliVerify, DeterministicOutput) {
  CliRun a = run("verify --suite crossing --seed 5 --trials 3 --no-timing");
  CliRun b = run("verify --suite crossing --seed 5 --trials 3 --no-timing");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
}

TEST(CliVerify, SeedFromEnvironment) {
  CliRun env = run("verify --suite ybe --trials 2 --no-timing", "HSV_SEED=77");
  CliRun flag = run("verify --suite ybe --trials 2 --no-timing --seed 77");
  ASSERT_EQ(env.code, 0);
  EXPECT_EQ(env.out, flag.out);
  EXPECT_EQ(json::parse(env.out)["seed"], 77);
  EXPECT_EQ(run("verify --suite ybe --trials 1", "HSV_SEED=abc").code, 64);
}

TEST(CliGolden, AllDrawsMatch) {
  CliRun r = run("golden");
  ASSERT_EQ(r.code, 0);
  auto js = json::parse(r.out);
  EXPECT_EQ(js["status"], "pass");
  EXPECT_EQ(js["golden"].size(), 5u);
  for (const auto& d : js["golden"])
    for (const char* J : {"1", "2"}) {
      EXPECT_EQ(d["spins"][J]["mismatches"], 0);
      EXPECT_TRUE(d["spins"][J]["symmetric"].get<bool>());
    }
}

TEST(CliOutput, WritesToFile) {
  std::string path = testing::TempDir() + "hsv_cli_out.json";
  ASSERT_EQ(run("-o " + path + " rmat --weights 1 1 --lambda 2 --h 1/3").code, 0);
  FILE* f = fopen(path.c_str(), "r");
  ASSERT_NE(f, nullptr);
  std::string text;
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, f)) text.append(buf, n);
  fclose(f);
  EXPECT_EQ(json::parse(text)["weights"], json({1, 1}));
}
