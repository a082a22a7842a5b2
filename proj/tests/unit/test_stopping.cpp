#include <gtest/gtest.h>

#include <cmath>
#include <memory>

#include "fwmc/error.hpp"
#include "fwmc/samplers.hpp"
#include "fwmc/stopping.hpp"

using namespace fwmc;

namespace {

PenaltySpec spec45() { return {0.005, 45, 0.0, 1.0}; }

ScalarSource constant_source(double v) {
  return [v]() -> std::optional<double> { return v; };
}

ScalarSource two_state_source(TwoStateChain chain, std::uint64_t seed) {
  auto rng = std::make_shared<Rng>(seed);
  auto state = std::make_shared<int>(0);
  return [=]() -> std::optional<double> {
    const double v = *state;
    *state = two_state_step(chain, *state, *rng);
    return v;
  };
}

}  // namespace

TEST(Penalty, Indicator) {
  EXPECT_EQ(penalty(40, spec45()), 0.005);
  EXPECT_EQ(penalty(45, spec45()), 0.005);
  EXPECT_EQ(penalty(46, spec45()), 0.0);
}

TEST(Penalty, PolynomialTerm) {
  EXPECT_NEAR(penalty(100, {0.005, 45, 1.0, 1.0}), 0.01, 1e-15);
  EXPECT_NEAR(penalty(100, {0.005, 45, 2.0, 0.75}), 2.0 * std::pow(100.0, -0.75), 1e-15);
}

TEST(ShouldStop, Examples) {
  EXPECT_TRUE(should_stop(0.0049, 2600, spec45()));
  EXPECT_FALSE(should_stop(0.0001, 40, spec45()));
  EXPECT_FALSE(should_stop(0.0060, 1'000'000, spec45()));
  EXPECT_TRUE(should_stop(0.005, 46, spec45()));
}

TEST(ShouldStop, NeverAtOrBelowNStar) {
  for (std::int64_t n = 1; n <= 45; ++n) EXPECT_FALSE(should_stop(0.0, n, spec45()));
  EXPECT_TRUE(should_stop(0.0, 46, spec45()));
}

TEST(ShouldStop, MonotoneInWidth) {
  for (double h = 0.0; h < 0.01; h += 0.0003) {
    if (!should_stop(h, 500, spec45())) EXPECT_FALSE(should_stop(h + 1e-4, 500, spec45()));
  }
}

TEST(Checkpoints, EveryK) {
  CheckpointSchedule s(CheckpointPolicy::every(100));
  int hits = 0;
  for (std::int64_t n = 1; n <= 1000; ++n) {
    if (s.due(n)) {
      ++hits;
      EXPECT_EQ(n % 100, 0);
    }
  }
  EXPECT_EQ(hits, 10);
}

TEST(Checkpoints, GeometricStrictlyIncreasing) {
  CheckpointSchedule s(CheckpointPolicy::geometric(1.05, 10));
  std::int64_t last = 0;
  int hits = 0;
  for (std::int64_t n = 1; n <= 10000; ++n) {
    if (s.due(n)) {
      EXPECT_GT(n, last);
      EXPECT_GE(n, 10);
      last = n;
      ++hits;
    }
  }
  EXPECT_GT(hits, 20);
  EXPECT_LT(hits, 200);
}

TEST(Labels, Names) {
  EXPECT_EQ(label(Estimator{FixedBatchMeans{30}}), "bm30");
  EXPECT_EQ(label(Estimator{ConsistentBatchMeans{0.5}}), "cbm(0.5)");
  EXPECT_EQ(label(Estimator{Regenerative{}}), "rs");
}

TEST(TrySchedule, SkipsUntilRunnable) {
  EXPECT_FALSE(try_schedule(FixedBatchMeans{30}, 59).has_value());
  EXPECT_TRUE(try_schedule(FixedBatchMeans{30}, 60).has_value());
  EXPECT_FALSE(try_schedule(ConsistentBatchMeans{0.5}, 3).has_value());
}

TEST(RunUntilWidth, ConstantSourceStopsPastNStar) {
  StoppingConfig cfg;
  cfg.n_star = 45;
  const auto r = run_until_width(constant_source(1.25), ConsistentBatchMeans{0.5}, cfg);
  EXPECT_TRUE(r.converged());
  EXPECT_EQ(r.iterations, 100);
  EXPECT_EQ(r.half_width, 0.0);
  EXPECT_EQ(r.estimate, 1.25);

  const auto every = run_until_width(constant_source(1.25), FixedBatchMeans{2}, cfg, CheckpointPolicy::every(1));
  EXPECT_EQ(every.iterations, 46);
}

TEST(RunUntilWidth, IidPilotFormula) {
  StoppingConfig cfg;
  cfg.epsilon = 0.01;
  cfg.n_star = 1000;
  const auto r = run_until_width(two_state_source({0.5, 0.5}, 42), ConsistentBatchMeans{0.5}, cfg);
  EXPECT_TRUE(r.converged());
  EXPECT_GT(r.iterations, 9604 / 2);
  EXPECT_LT(r.iterations, 9604 * 2);
  EXPECT_LE(r.half_width, 0.01);
}

TEST(RunUntilWidth, CapIsFlagged) {
  StoppingConfig cfg;
  cfg.epsilon = 1e-6;
  cfg.n_star = 10;
  const auto r = run_until_width(two_state_source({0.5, 0.5}, 1), FixedBatchMeans{30}, cfg,
                                 CheckpointPolicy::every(100), 5000);
  EXPECT_EQ(r.reason, StopReason::Cap);
  EXPECT_FALSE(r.converged());
  EXPECT_EQ(r.iterations, 5000);
}

TEST(RunUntilWidth, CapBelowNStarRejected) {
  StoppingConfig cfg;
  cfg.n_star = 100;
  EXPECT_THROW(run_until_width(constant_source(1.0), FixedBatchMeans{30}, cfg, CheckpointPolicy::every(100), 50),
               Error);
}

TEST(RunUntilWidth, SourceExhausted) {
  auto left = std::make_shared<int>(20);
  ScalarSource src = [left]() -> std::optional<double> {
    if ((*left)-- <= 0) return std::nullopt;
    return 1.0;
  };
  StoppingConfig cfg;
  cfg.n_star = 45;
  try {
    run_until_width(src, FixedBatchMeans{2}, cfg, CheckpointPolicy::every(1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_STREQ(e.what(), "source exhausted");
  }
}

TEST(RunUntilWidth, RegenerativeTours) {
  // Tours alternate between two shapes, so the ratio estimate is exactly 0.5.
  auto r = std::make_shared<int>(0);
  TourSource src = [r]() -> std::optional<Tour> {
    return (++*r % 2) ? Tour{1, 1.0} : Tour{3, 1.0};
  };
  StoppingConfig cfg;
  cfg.epsilon = 0.3;
  cfg.n_star = 30;
  const auto rep = run_until_width(src, cfg);
  EXPECT_TRUE(rep.converged());
  ASSERT_TRUE(rep.tours.has_value());
  EXPECT_GT(*rep.tours, 30);
  EXPECT_EQ(rep.method, "rs");
  EXPECT_LE(rep.half_width, 0.3);
}

TEST(RegenerativeMonitor, TracksToursFromFlags) {
  StoppingConfig cfg;
  cfg.n_star = 1000;
  RegenerativeMonitor m(cfg);
  // Path 0,1,1,0,0 with regeneration on every entry to 0.
  const int path[] = {0, 1, 1, 0, 0};
  for (int i = 0; i + 1 < 5; ++i) m.observe(path[i], path[i + 1] == 0);
  EXPECT_EQ(m.tours(), 2);
  EXPECT_EQ(m.iterations(), 4);
}

TEST(BatchMeansMonitor, IgnoresInputAfterStop) {
  StoppingConfig cfg;
  cfg.n_star = 5;
  BatchMeansMonitor m(FixedBatchMeans{2}, cfg, CheckpointPolicy::every(1));
  std::optional<FixedWidthReport> rep;
  for (int i = 0; i < 10 && !rep; ++i) rep = m.observe(3.0);
  ASSERT_TRUE(rep.has_value());
  EXPECT_EQ(rep->iterations, 6);
  EXPECT_TRUE(m.stopped());
  EXPECT_FALSE(m.observe(100.0).has_value());
}

TEST(BatchMeansMonitor, RejectsTourCheckpoints) {
  EXPECT_THROW(BatchMeansMonitor(FixedBatchMeans{30}, StoppingConfig{}, CheckpointPolicy::every_tour()), Error);
}
