#include "dgtime/harness/rates.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace dgtime::harness;

TEST(Rates, SecondOrderExample) {
  const auto r = estimate_rates({0.1, 0.025, 0.00625}, {0.1, 0.05, 0.025});
  ASSERT_TRUE(r.slope);
  EXPECT_NEAR(*r.slope, 2.0, 1e-12);
  ASSERT_EQ(r.pairwise.size(), 2u);
  EXPECT_NEAR(*r.pairwise[0], 2.0, 1e-12);
  EXPECT_NEAR(*r.pairwise[1], 2.0, 1e-12);
  EXPECT_EQ(check_rate("x", r, 2.0).status, RateStatus::pass);
  EXPECT_EQ(check_rate("x", r, 1.0).status, RateStatus::fail);
  EXPECT_EQ(check_rate("x", r, std::nullopt).status, RateStatus::skipped);
}

TEST(Rates, ConstantErrorsGiveZero) {
  const auto r = estimate_rates({0.3, 0.3, 0.3}, {1.0, 0.5, 0.25});
  EXPECT_NEAR(*r.slope, 0.0, 1e-14);
}

TEST(Rates, UsesLastThreeLevelsOnly) {
  const auto r = estimate_rates({5.0, 0.1, 0.05, 0.025}, {1.0, 0.5, 0.25, 0.125});
  EXPECT_NEAR(*r.slope, 1.0, 1e-12);
}

TEST(Rates, ExactAtFloor) {
  const auto r = estimate_rates({1e-15, 1e-15}, {0.5, 0.25});
  EXPECT_TRUE(r.exact);
  EXPECT_FALSE(r.slope);
  EXPECT_FALSE(r.pairwise[0]);
  EXPECT_EQ(check_rate("x", r, 3.0).status, RateStatus::exact);
  EXPECT_TRUE(check_rate("x", r, 3.0).ok());
}

TEST(Rates, PartialFloorFailsGate) {
  const auto r = estimate_rates({1e-3, 1e-8, 1e-16}, {0.5, 0.25, 0.125});
  EXPECT_FALSE(r.exact);
  EXPECT_FALSE(r.slope);
  EXPECT_EQ(check_rate("x", r, 2.0).status, RateStatus::fail);
}

TEST(Rates, MarginBoundary) {
  const auto r = estimate_rates({1.0, std::pow(2.0, -1.8), std::pow(2.0, -3.6)}, {1.0, 0.5, 0.25});
  EXPECT_EQ(check_rate("x", r, 2.0, 0.21).status, RateStatus::pass);
  EXPECT_EQ(check_rate("x", r, 2.0, 0.19).status, RateStatus::fail);
}

TEST(Rates, InvalidInput) {
  EXPECT_THROW(estimate_rates({1.0}, {1.0}), std::invalid_argument);
  EXPECT_THROW(estimate_rates({1.0, 2.0}, {1.0}), std::invalid_argument);
  EXPECT_THROW(estimate_rates({1.0, -1.0}, {1.0, 0.5}), std::invalid_argument);
  EXPECT_THROW(estimate_rates({1.0, NAN}, {1.0, 0.5}), std::invalid_argument);
  EXPECT_THROW(estimate_rates({1.0, 0.5}, {1.0, 0.0}), std::invalid_argument);
}
