#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <vector>

#include "fwmc/regeneration.hpp"
#include "fwmc/rng.hpp"

namespace fwmc {

// ---------------------------------------------------------------------------
// Pareto target explored by an independence sampler with a Pareto proposal.

// Inverse-CDF draw from Pareto(alpha, shape): alpha * u^(-1/shape).
double pareto_draw(double alpha, double shape, double u);

struct ParetoIndepMH {
  double alpha = 1.0;   // scale
  double beta = 10.0;   // target shape
  double lambda = 9.0;  // proposal shape, lambda <= beta
  double c = 1.5;       // regeneration constant

  void validate() const;
  // E_pi x = alpha beta / (beta - 1).
  double target_mean() const { return alpha * beta / (beta - 1.0); }
  // pi(x)/nu(x) = (beta/lambda) alpha^(beta-lambda) x^(lambda-beta).
  double density_ratio(double x) const;
  // min{1, (x/y)^(beta-lambda)}.
  double accept_prob(double x, double y) const;
};

struct MHStep {
  double state = 0.0;
  bool accepted = false;
  double accept_prob = 0.0;
  double regen_prob = 0.0;
};

MHStep pareto_mh_step(const ParetoIndepMH& sampler, double x, Rng& rng);

// X_0 ~ Q for the independence-sampler minorization: q is proportional to
// nu(y) min{r(y)/c, 1}, drawn by rejection from nu.
double pareto_initial_state(const ParetoIndepMH& sampler, Rng& rng);

// ---------------------------------------------------------------------------
// Normal hierarchical model
//   y_i | theta_i ~ N(theta_i, a),  theta_i | mu, lambda ~ N(mu, lambda),
//   lambda ~ IG(b, c),  flat prior on mu.

class HierModel {
public:
  HierModel(std::vector<double> y, double a, double b, double c);

  std::span<const double> y() const { return y_; }
  std::size_t size() const { return y_.size(); }
  double a() const { return a_; }
  double b() const { return b_; }
  double c() const { return c_; }
  double ybar() const { return ybar_; }
  // s^2 = sum (y_i - ybar)^2 (a sum of squares, not a variance).
  double s2() const { return s2_; }

  // Unnormalized log pi(lambda | y).
  double log_lambda_posterior(double lambda) const;
  // log h(lambda) = ((1-K)/2) log(lambda + a) - s^2 / (2(lambda + a)).
  double log_accept_weight(double lambda) const;
  // argmax of h over lambda >= 0: max{0, s^2/(K-1) - a}.
  double accept_weight_argmax() const;
  double log_accept_bound() const { return log_bound_; }

private:
  std::vector<double> y_;
  double a_;
  double b_;
  double c_;
  double ybar_ = 0.0;
  double s2_ = 0.0;
  double log_bound_ = 0.0;
};

struct InverseGammaParams {
  double shape = 1.0;
  double rate = 1.0;
};

struct NormalParams {
  double mean = 0.0;
  double variance = 1.0;
};

// lambda | theta, y ~ IG(b + (K-1)/2, c + sum (theta_i - theta_bar)^2 / 2).
InverseGammaParams lambda_conditional(const HierModel& model, std::span<const double> theta);
// mu | theta, lambda, y ~ N(theta_bar, lambda/K).
NormalParams mu_conditional(std::span<const double> theta, double lambda);
// theta_i | lambda, mu, y ~ N((lambda y_i + a mu)/(lambda + a), a lambda/(lambda + a)).
NormalParams theta_conditional(const HierModel& model, double lambda, double mu, std::size_t i);

struct GibbsState {
  double lambda = 1.0;
  double mu = 0.0;
  std::vector<double> theta;
};

// One block Gibbs transition: lambda | theta, then mu | theta, lambda, then
// theta | lambda, mu. Updates state in place.
void gibbs_sweep(const HierModel& model, GibbsState& state, Rng& rng);

struct AcceptRejectStats {
  std::int64_t proposals = 0;
  std::int64_t accepted = 0;
  std::int64_t bound_violations = 0;  // h(lambda) > M; must stay 0
};

// Exact posterior draw: lambda by accept-reject with an IG(b, c) candidate,
// then mu | lambda, y ~ N(ybar, (lambda + a)/K), then theta | lambda, mu, y.
// Throws after 10^6 rejected proposals.
GibbsState iid_posterior_draw(const HierModel& model, Rng& rng, AcceptRejectStats* stats = nullptr);

// D = [d1,d2] x [d3,d4] from a pilot run: d1 = max{.01, lambda~ - S_l/2},
// d2 = lambda~ + S_l/2, d3 = mu~ - S_mu, d4 = mu~ + S_mu, theta~ the pilot mean.
GibbsRegenSpec gibbs_regen_from_pilot(const HierModel& model, std::span<const GibbsState> pilot);

// Draw from Q: (lambda, mu) ~ f(. | theta~) restricted to D by rejection,
// then theta ~ f(theta | lambda, mu).
GibbsState gibbs_initial_state(const HierModel& model, const GibbsRegenSpec& spec, Rng& rng);

// Data file: one real per line, no header.
std::vector<double> read_data_csv(const std::filesystem::path& path);
void write_data_csv(const std::filesystem::path& path, std::span<const double> values);

// Synthetic data drawn from the model with mu fixed and lambda ~ IG(b, c).
std::vector<double> synthetic_hier_data(std::uint64_t seed, std::size_t k, double mu, double a,
                                        double b, double c);

// ---------------------------------------------------------------------------
// Two-state chain on {0, 1}: P(0 -> 1) = p, P(1 -> 0) = q.

struct TwoStateChain {
  double p = 0.5;
  double q = 0.5;

  void validate() const;
  double stationary_one() const { return p / (p + q); }
  // sigma^2_g for g = identity: pq(2 - p - q)/(p + q)^3.
  double asymptotic_variance() const { return p * q * (2.0 - p - q) / std::pow(p + q, 3.0); }
};

int two_state_step(const TwoStateChain& chain, int state, Rng& rng);

// ---------------------------------------------------------------------------
// Split chains: a sampler paired with its regeneration indicator.

class SplitChain {
public:
  virtual ~SplitChain() = default;
  // g(X_i) for the current state.
  virtual double value() const = 0;
  // Moves to X_{i+1} and returns delta_i.
  virtual bool advance() = 0;
};

class ParetoSplitChain final : public SplitChain {
public:
  ParetoSplitChain(ParetoIndepMH sampler, std::uint64_t seed);
  double value() const override { return state_; }
  bool advance() override;
  const RegenDiagnostics& diagnostics() const { return diag_; }

private:
  ParetoIndepMH sampler_;
  Rng rng_;
  double state_;
  RegenDiagnostics diag_;
};

// g = theta_{coordinate} (0-based).
class GibbsSplitChain final : public SplitChain {
public:
  GibbsSplitChain(const HierModel& model, GibbsRegenSpec spec, std::size_t coordinate,
                  std::uint64_t seed);
  double value() const override { return state_.theta[coordinate_]; }
  bool advance() override;
  const GibbsState& state() const { return state_; }
  const RegenDiagnostics& diagnostics() const { return diag_; }

private:
  const HierModel& model_;
  GibbsRegenSpec spec_;
  std::size_t coordinate_;
  Rng rng_;
  GibbsState state_;
  std::vector<double> prev_theta_;
  RegenDiagnostics diag_;
};

// Starts in the atom and regenerates on every return to it.
class TwoStateSplitChain final : public SplitChain {
public:
  TwoStateSplitChain(TwoStateChain chain, std::uint64_t seed, int atom = 0);
  double value() const override { return state_; }
  bool advance() override;

private:
  TwoStateChain chain_;
  Rng rng_;
  int atom_;
  int state_;
};

}  // namespace fwmc
