#include <gtest/gtest.h>

#include "carlbell/verify.hpp"

using namespace carlbell;

class SuiteTest : public ::testing::TestWithParam<std::string> {};

TEST_P(SuiteTest, PassesAcrossSeeds) {
  for (std::uint64_t seed : {1u, 2u, 20240601u}) {
    const auto report = run_suite(GetParam(), 300, seed);
    EXPECT_EQ(report.failures, 0) << "seed " << seed;
    EXPECT_LE(report.worst_violation, 1.0);
    EXPECT_GT(report.samples, 0);
    for (const auto& c : report.checks) EXPECT_EQ(c.failures, 0) << c.name << " worst " << c.worst;
  }
}

INSTANTIATE_TEST_SUITE_P(AllSuites, SuiteTest, ::testing::ValuesIn(suite_names()));

TEST(RunSuite, DeterministicForSeed) {
  const auto a = run_suite("concavity", 200, 99);
  const auto b = run_suite("concavity", 200, 99);
  ASSERT_EQ(a.checks.size(), b.checks.size());
  for (std::size_t i = 0; i < a.checks.size(); ++i) EXPECT_EQ(a.checks[i].worst, b.checks[i].worst);
  EXPECT_EQ(a.elapsed_ms, 0);
}

TEST(RunSuite, ToleranceOverrideForcesFailures) {
  const auto report = run_suite("euler", 100, 3, 1e-30);
  EXPECT_GT(report.failures, 0);
  EXPECT_GT(report.worst_violation, 1.0);
}

TEST(RunSuite, UnknownSuite) { EXPECT_THROW((void)run_suite("nope", 10, 1), Error); }

TEST(CheckResult, NanCountsAsFailure) {
  CheckResult c{"x", 1e-3};
  c.record(1e-4);
  c.record(std::numeric_limits<double>::quiet_NaN());
  c.record(1e-5);
  EXPECT_EQ(c.samples, 3);
  EXPECT_EQ(c.failures, 1);
  EXPECT_TRUE(std::isnan(c.worst));
}
