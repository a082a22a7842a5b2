#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "fwmc/error.hpp"
#include "fwmc/regeneration.hpp"

using namespace fwmc;

namespace {

GibbsRegenSpec small_spec() {
  GibbsRegenSpec spec;
  spec.theta_tilde = {0.0, 0.0};
  spec.d1 = 0.5;
  spec.d2 = 2.0;
  spec.d3 = -1.0;
  spec.d4 = 1.0;
  spec.a = 1.0;
  spec.b = 2.0;
  spec.c = 2.0;
  return spec;
}

}  // namespace

TEST(RegenGeneral, Examples) {
  MinorizationSpec<double> full{[](const double&) { return 1.0; }, [](const double&) { return 0.7; },
                                [](const double&, const double&) { return 0.7; }};
  EXPECT_EQ(regen_prob_general(0.0, 1.0, full), 1.0);

  MinorizationSpec<double> none{[](const double&) { return 0.0; }, [](const double&) { return 0.7; },
                                [](const double&, const double&) { return 0.7; }};
  EXPECT_EQ(regen_prob_general(0.0, 1.0, none), 0.0);

  MinorizationSpec<double> mixed{[](const double&) { return 0.5; }, [](const double&) { return 0.2; },
                                 [](const double&, const double&) { return 0.4; }};
  EXPECT_NEAR(regen_prob_general(0.0, 1.0, mixed), 0.25, 1e-15);
}

TEST(RegenGeneral, ZeroDensityRejected) {
  MinorizationSpec<double> bad{[](const double&) { return 0.5; }, [](const double&) { return 0.2; },
                               [](const double&, const double&) { return 0.0; }};
  EXPECT_THROW(regen_prob_general(0.0, 1.0, bad), Error);
}

TEST(ClampProbability, RecordsExcess) {
  RegenDiagnostics diag;
  EXPECT_EQ(clamp_probability(1.0 + 1e-12, &diag), 1.0);
  EXPECT_EQ(diag.excess_count, 0);
  EXPECT_EQ(clamp_probability(1.2, &diag), 1.0);
  EXPECT_EQ(diag.excess_count, 1);
  EXPECT_NEAR(diag.max_raw, 1.2, 1e-15);
  EXPECT_EQ(clamp_probability(-0.1, &diag), 0.0);
  EXPECT_THROW(clamp_probability(std::nan(""), &diag), Error);
}

TEST(IndepMH, ParetoCase) {
  // r(x) = (beta/lambda) x^(lambda - beta) for alpha = 1, beta = 10, lambda = 9.
  IndepMHRegenSpec<double> spec{1.5, [](const double& x) { return (10.0 / 9.0) / x; }};
  EXPECT_NEAR(regen_prob_indep_mh(1.2, 1.0, true, spec), (1.0 / 1.5) * (10.0 / 9.0), 1e-15);
  EXPECT_EQ(regen_prob_indep_mh(1.2, 1.0, false, spec), 0.0);
}

TEST(IndepMH, ThreeCases) {
  EXPECT_NEAR(indep_mh_regen_prob(2.0, 3.0, 1.5), 0.75, 1e-15);
  EXPECT_EQ(indep_mh_regen_prob(1.0, 2.0, 1.5), 1.0);
  EXPECT_NEAR(indep_mh_regen_prob(0.5, 1.2, 1.5), 0.8, 1e-15);
}

TEST(IndepMH, ScaleInvariance) {
  for (double kappa : {0.125, 3.0, 1024.0}) {
    for (auto [rx, ry] : {std::pair{2.0, 3.0}, std::pair{0.5, 1.2}, std::pair{1.0, 2.0}}) {
      EXPECT_EQ(indep_mh_regen_prob(kappa * rx, kappa * ry, kappa * 1.5), indep_mh_regen_prob(rx, ry, 1.5));
    }
  }
}

TEST(Atom, Membership) {
  EXPECT_TRUE(atom_regen(0, 0));
  EXPECT_FALSE(atom_regen(1, 0));
}

TEST(Tours, FromTwoStatePath) {
  const std::vector<double> path = {0, 1, 1, 0, 0};
  std::vector<bool> flags;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) flags.push_back(atom_regen(path[i + 1], 0.0));
  const TourSet tours = tours_from_run(ScalarTrace(path), flags);
  ASSERT_EQ(tours.count(), 2);
  EXPECT_EQ(tours.tours()[0], (Tour{3, 2.0}));
  EXPECT_EQ(tours.tours()[1], (Tour{1, 0.0}));
}

TEST(Tours, FlagPatterns) {
  const ScalarTrace trace({1.0, 2.0, 3.0, 4.0});
  const TourSet every = tours_from_run(trace, {true, true, true, true});
  ASSERT_EQ(every.count(), 4);
  for (int i = 0; i < 4; ++i) EXPECT_EQ(every.tours()[i], (Tour{1, trace[i]}));

  const TourSet pairs = tours_from_run(trace, {false, true, false, true});
  ASSERT_EQ(pairs.count(), 2);
  EXPECT_EQ(pairs.tours()[0], (Tour{2, 3.0}));
  EXPECT_EQ(pairs.tours()[1], (Tour{2, 7.0}));

  try {
    tours_from_run(trace, {false, false, false, false});
    FAIL();
  } catch (const Error& e) {
    EXPECT_STREQ(e.what(), "no regenerations observed");
  }
}

TEST(Tours, BuilderMatchesBatch) {
  TourBuilder b;
  EXPECT_FALSE(b.push(1.0, false).has_value());
  const auto t = b.push(2.0, true);
  ASSERT_TRUE(t.has_value());
  EXPECT_EQ(*t, (Tour{2, 3.0}));
  EXPECT_EQ(b.open().length, 0);
}

TEST(GibbsRegen, AnchorStateRegeneratesSurely) {
  const GibbsRegenSpec spec = small_spec();
  const std::vector<double> theta = {0.3, -0.2};
  EXPECT_NEAR(gibbs_regen_prob(spec.theta_tilde, 1.0, 0.0, theta, spec), 1.0, 1e-12);
  EXPECT_NEAR(gibbs_regen_prob(spec.theta_tilde, 0.5, -1.0, theta, spec), 1.0, 1e-12);
}

TEST(GibbsRegen, OutsideDIsZero) {
  const GibbsRegenSpec spec = small_spec();
  const std::vector<double> theta = {0.0, 0.0};
  EXPECT_EQ(gibbs_regen_prob(spec.theta_tilde, 3.0, 0.0, theta, spec), 0.0);
  EXPECT_EQ(gibbs_regen_prob(spec.theta_tilde, 1.0, 1.5, theta, spec), 0.0);
  EXPECT_THROW(gibbs_regen_prob(spec.theta_tilde, 0.0, 0.0, theta, spec), Error);
}

TEST(GibbsRegen, SmallExample) {
  const GibbsRegenSpec spec = small_spec();
  const std::vector<double> prev = {1.0, 1.0};
  const std::vector<double> theta = {0.0, 0.0};
  const double p = gibbs_regen_prob(prev, 1.0, 0.0, theta, spec);
  EXPECT_LE(std::fabs(p - std::exp(-5.0)), 1e-9 * std::exp(-5.0));
}

TEST(GibbsRegen, NeverExceedsOne) {
  const GibbsRegenSpec spec = small_spec();
  RegenDiagnostics diag;
  const std::vector<double> theta = {0.0, 0.0};
  for (double t1 = -2.0; t1 <= 2.0; t1 += 0.5) {
    for (double t2 = -2.0; t2 <= 2.0; t2 += 0.5) {
      for (double lam = 0.5; lam <= 2.0; lam += 0.25) {
        for (double mu = -1.0; mu <= 1.0; mu += 0.25) {
          const std::vector<double> prev = {t1, t2};
          const double p = gibbs_regen_prob(prev, lam, mu, theta, spec, &diag);
          EXPECT_GE(p, 0.0);
          EXPECT_LE(p, 1.0);
        }
      }
    }
  }
  EXPECT_EQ(diag.excess_count, 0);
}
