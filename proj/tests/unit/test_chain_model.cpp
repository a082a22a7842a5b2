#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "fwmc/chain_model.hpp"
#include "fwmc/error.hpp"

using namespace fwmc;

TEST(Schedule, CbmSquareRoot) {
  const auto s = cbm_schedule(2500, 0.5);
  EXPECT_EQ(s.batches, 50);
  EXPECT_EQ(s.batch_size, 50);
  ASSERT_TRUE(s.theta.has_value());
  EXPECT_EQ(*s.theta, 0.5);
}

TEST(Schedule, CbmCubeRootSnapsToInteger) {
  const auto s = cbm_schedule(1000, 1.0 / 3.0);
  EXPECT_EQ(s.batches, 100);
  EXPECT_EQ(s.batch_size, 10);
}

TEST(Schedule, CbmSmallSample) {
  const auto s = cbm_schedule(7, 0.5);
  EXPECT_EQ(s.batches, 3);
  EXPECT_EQ(s.batch_size, 2);
  EXPECT_EQ(s.consumed(), 6);
}

TEST(Schedule, CbmRejectsTinySamples) {
  EXPECT_THROW(cbm_schedule(3, 0.5), Error);
  EXPECT_THROW(cbm_schedule(100, 0.0), Error);
  EXPECT_THROW(cbm_schedule(100, 1.0), Error);
}

TEST(Schedule, Fixed) {
  const auto s = fixed_schedule(3000, 30);
  EXPECT_EQ(s.batches, 30);
  EXPECT_EQ(s.batch_size, 100);
  EXPECT_FALSE(s.theta.has_value());

  const auto t = fixed_schedule(60, 30);
  EXPECT_EQ(t.batch_size, 2);
}

TEST(Schedule, FixedRejectsShortRuns) {
  try {
    fixed_schedule(45, 30);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_STREQ(e.what(), "insufficient sample");
  }
  EXPECT_THROW(fixed_schedule(100, 1), Error);
}

TEST(Trace, RejectsNonFinite) {
  EXPECT_THROW(ScalarTrace({1.0, std::numeric_limits<double>::quiet_NaN()}), Error);
  EXPECT_THROW(ScalarTrace({std::numeric_limits<double>::infinity()}), Error);
  const ScalarTrace t({1.0, 2.0});
  EXPECT_EQ(t.size(), 2);
  EXPECT_EQ(t[1], 2.0);
}

TEST(Tours, TotalsAndValidation) {
  const TourSet tours({{2, 4.0}, {3, 1.5}});
  EXPECT_EQ(tours.count(), 2);
  EXPECT_EQ(tours.total_length(), 5);
  EXPECT_THROW(TourSet({{0, 1.0}}), Error);
  EXPECT_THROW(TourSet({{1, std::nan("")}}), Error);
}

TEST(StoppingConfig, Validation) {
  StoppingConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.epsilon = 0.0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.delta = 1.0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.n_star = 0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.penalty_c = 1.0;
  cfg.penalty_k = 0.5;
  EXPECT_THROW(cfg.validate(), Error);
}

TEST(StopReason, Names) {
  EXPECT_EQ(to_string(StopReason::Converged), "converged");
  EXPECT_EQ(to_string(StopReason::Cap), "cap");
  EXPECT_EQ(to_string(StopReason::SourceExhausted), "source exhausted");
}
