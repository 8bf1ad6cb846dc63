#include <gtest/gtest.h>

#include <fstream>
#include <string>

#include "gdof/scheme_planner.hpp"
#include "gdof/serialization.hpp"

#ifndef GDOF_TEST_GOLDEN_DIR
#error "GDOF_TEST_GOLDEN_DIR must point at tests/golden"
#endif

namespace {

namespace scheme = gdof::scheme;
using gdof::GdofParams;

TEST(Plan, WeakRegimeLoads) {
  const GdofParams p{3, 2, 3, 0.4};
  const auto plan = scheme::plan(p);
  EXPECT_EQ(plan.construction, scheme::Construction::kWeak);
  ASSERT_EQ(plan.users.size(), 3U);
  const auto& cws = plan.users[0].codewords;
  ASSERT_EQ(cws.size(), 4U);
  EXPECT_EQ(cws[0].kind, scheme::CodewordKind::kCommon);
  EXPECT_NEAR(cws[0].load, 0.1, 1e-12);
  EXPECT_DOUBLE_EQ(cws[0].power_exponent, 0.0);
  EXPECT_EQ(cws[2].kind, scheme::CodewordKind::kPrivate);
  EXPECT_NEAR(cws[2].load, 0.6, 1e-12);
  EXPECT_DOUBLE_EQ(cws[2].power_exponent, 0.4);
  EXPECT_NEAR(plan.total_load(), 4.2, 1e-12);
  EXPECT_TRUE(plan.warnings.empty());
}

TEST(Plan, StrongRegimeSaturates) {
  const auto plan = scheme::plan({3, 2, 3, 2.0});
  EXPECT_EQ(plan.construction, scheme::Construction::kStrong);
  for (const auto& cw : plan.users[1].codewords) {
    EXPECT_EQ(cw.kind, scheme::CodewordKind::kCommon);
    EXPECT_DOUBLE_EQ(cw.load, 1.0);
  }
  EXPECT_NEAR(plan.total_load(), 6.0, 1e-12);
}

TEST(Plan, ReceiverRoles) {
  const auto plan = scheme::plan({3, 1, 2, 0.3});
  // each user: 1 common + 1 private; receiver 0 decodes 3 commons + own private
  const auto& rx = plan.receivers[0];
  EXPECT_EQ(rx.decoded.size(), 4U);
  EXPECT_EQ(rx.treated_as_noise.size(), 2U);
  EXPECT_TRUE(rx.nulled.empty());
  for (const auto& s : rx.treated_as_noise) EXPECT_NE(s.user, 0);
}

TEST(Plan, ReceiverProblemLayout) {
  const auto plan = scheme::plan({3, 2, 3, 0.4});
  const auto rv = scheme::receiver_problem(plan, 1);
  EXPECT_EQ(rv.problem.M1, 4);
  EXPECT_EQ(rv.problem.M2, 4);
  EXPECT_EQ(rv.problem.N, 3);
  // privates arrive at (alpha - alpha)^+ = 0 at unintended receivers
  for (double a : rv.problem.noise_levels) EXPECT_DOUBLE_EQ(a, 0.0);
  EXPECT_EQ(rv.tuple.d.size(), 8U);
}

TEST(Plan, RefusesSeparableConfigurations) {
  EXPECT_THROW((void)scheme::plan({3, 1, 3, 0.5}), scheme::NotCoveredError);
  EXPECT_THROW((void)scheme::zero_force_plan({3, 2, 3, 0.5}), std::domain_error);
  EXPECT_THROW((void)scheme::plan({3, 2, 3, -1.0}), std::domain_error);
}

TEST(ZeroForcing, SumsToKM) {
  for (const GdofParams& p : {GdofParams{3, 1, 5, 0.7}, GdofParams{2, 2, 4, 1.5}, GdofParams{2, 1, 2, 0.3}}) {
    const auto plan = scheme::zero_force_plan(p);
    const auto v = scheme::validate(plan, p);
    EXPECT_DOUBLE_EQ(v.achieved_sum_gdof, static_cast<double>(p.K) * p.M);
    EXPECT_TRUE(v.match);
    ASSERT_TRUE(v.rank_certificate);
    EXPECT_EQ(plan.receivers[0].nulled.size(), static_cast<std::size_t>((p.K - 1) * p.M));
  }
}

TEST(Validate, MatchesFormulaAcrossRegimes) {
  for (int K = 2; K <= 4; ++K)
    for (int M = 1; M <= 3; ++M)
      for (int N = 1; N <= 4; ++N)
        for (int i = 0; i <= 25; ++i) {
          const GdofParams p{K, M, N, i * 0.1};
          if (p.receivers_separate_all_streams()) continue;
          const auto plan = scheme::plan(p);
          const auto v = scheme::validate(plan, p);
          EXPECT_TRUE(v.match) << K << ' ' << M << ' ' << N << ' ' << p.alpha;
          EXPECT_TRUE(plan.warnings.empty());
        }
}

TEST(Validate, ConstructionsAgreeAtAlphaOne) {
  for (int M = 1; M <= 3; ++M)
    for (int N = 1; N <= 4; ++N) {
      const GdofParams p{3, M, N, 1.0};
      if (p.receivers_separate_all_streams()) continue;
      const auto moderate = scheme::validate(scheme::plan_with(p, scheme::Construction::kModerate), p);
      const auto strong = scheme::validate(scheme::plan_with(p, scheme::Construction::kStrong), p);
      EXPECT_TRUE(moderate.match);
      EXPECT_TRUE(strong.match);
      EXPECT_NEAR(moderate.achieved_sum_gdof, strong.achieved_sum_gdof, 1e-9);
    }
}

TEST(Validate, OverloadedPlanIsReportedNotThrown) {
  const GdofParams p{3, 2, 3, 0.4};
  auto plan = scheme::plan(p);
  plan.users[0].codewords[2].load += 0.05;  // private above its (1 - alpha) level
  const auto v = scheme::validate(plan, p);
  EXPECT_FALSE(v.all_achievable);
  EXPECT_FALSE(v.match);
  EXPECT_FALSE(v.receivers[0].verdict.achievable);
}

TEST(Validate, UnderloadedPlanIsAchievableButNoMatch) {
  const GdofParams p{3, 2, 3, 0.4};
  auto plan = scheme::plan(p);
  plan.users[2].codewords[0].load = 0.0;
  const auto v = scheme::validate(plan, p);
  EXPECT_TRUE(v.all_achievable);
  EXPECT_FALSE(v.match);
}

TEST(Golden, PlanThreeUsersTwoByThree) {
  std::ifstream in(std::string(GDOF_TEST_GOLDEN_DIR) + "/plan_3_2_3_0.4.json");
  ASSERT_TRUE(in);
  const auto golden = nlohmann::json::parse(in);
  const GdofParams p{3, 2, 3, 0.4};
  const auto plan = scheme::plan(p);
  const nlohmann::json now = {{"plan", plan}, {"validation", scheme::validate(plan, p)}};
  EXPECT_EQ(now, golden);
}

}  // namespace
