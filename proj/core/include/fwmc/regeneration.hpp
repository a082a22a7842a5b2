#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "fwmc/chain_model.hpp"
#include "fwmc/error.hpp"

namespace fwmc {

// Counts regeneration probabilities that exceeded 1 by more than the
// tolerance before being clamped. Such excursions point at an invalid
// minorization (or c) rather than rounding.
struct RegenDiagnostics {
  static constexpr double tolerance = 1e-9;

  std::int64_t excess_count = 0;
  double max_raw = 0.0;
};

// Clamps to [0,1], recording excess beyond the tolerance in diag.
double clamp_probability(double raw, RegenDiagnostics* diag = nullptr);

// Minorization P(x, dy) >= s(x) Q(dy) with densities q of Q and k(.|x) of
// the kernel, on the same normalization.
template <class State>
struct MinorizationSpec {
  std::function<double(const State&)> s;
  std::function<double(const State&)> q_density;
  std::function<double(const State& from, const State& to)> k_density;
};

// Pr(delta = 1 | x, y) = s(x) q(y) / k(y | x).
template <class State>
double regen_prob_general(const State& x, const State& y, const MinorizationSpec<State>& spec,
                          RegenDiagnostics* diag = nullptr);

// Independence Metropolis-Hastings: ratio(x) = pi(x)/nu(x), up to a
// constant shared with c.
template <class State>
struct IndepMHRegenSpec {
  double c = 1.0;
  std::function<double(const State&)> ratio;
};

// Regeneration probability of an accepted independence-sampler move,
// given r(x) = pi(x)/nu(x) at the current and proposed points:
//   c / min(r)   if min(r) > c
//   max(r) / c   if max(r) < c
//   1            otherwise
double indep_mh_regen_prob(double ratio_x, double ratio_y, double c);

// Zero on rejected moves: a rejection cannot be a draw from Q.
template <class State>
double regen_prob_indep_mh(const State& x, const State& y, bool accepted,
                           const IndepMHRegenSpec<State>& spec) {
  if (!accepted) return 0.0;
  return indep_mh_regen_prob(spec.ratio(x), spec.ratio(y), spec.c);
}

// Discrete chains regenerate on every entry to a fixed atom.
template <class State>
bool atom_regen(const State& next_state, const State& atom) {
  return next_state == atom;
}

// Minorization on D = [d1,d2] x [d3,d4] x R^K for the block Gibbs sampler
// of the normal hierarchical model, anchored at theta_tilde.
struct GibbsRegenSpec {
  std::vector<double> theta_tilde;
  double d1 = 0.0;
  double d2 = 0.0;
  double d3 = 0.0;
  double d4 = 0.0;
  // Model constants (observation variance a, IG prior b, c).
  double a = 1.0;
  double b = 2.0;
  double c = 2.0;

  void validate() const;
};

// Regeneration probability for the Gibbs transition
// (lambda', mu', theta_prev) -> (lambda, mu, theta). Depends on the new
// state only through (lambda, mu); theta is accepted for symmetry with the
// general formula, where f(theta | lambda, mu) cancels.
double gibbs_regen_prob(std::span<const double> theta_prev, double lambda, double mu,
                        std::span<const double> theta, const GibbsRegenSpec& spec,
                        RegenDiagnostics* diag = nullptr);

// Splits a run into tours. flags[i] is delta_i, the regeneration indicator
// of the transition X_i -> X_{i+1}; a tour ends after every flagged index.
// flags may omit the last index. The trailing incomplete tour is dropped.
TourSet tours_from_run(const ScalarTrace& trace, const std::vector<bool>& flags);

// Incremental form of tours_from_run.
class TourBuilder {
public:
  std::optional<Tour> push(double value, bool regenerates_after);
  const Tour& open() const { return open_; }

private:
  Tour open_{0, 0.0};
};

template <class State>
double regen_prob_general(const State& x, const State& y, const MinorizationSpec<State>& spec,
                          RegenDiagnostics* diag) {
  const double k = spec.k_density(x, y);
  if (!(k > 0.0)) throw Error("zero transition density");
  return clamp_probability(spec.s(x) * spec.q_density(y) / k, diag);
}

}  // namespace fwmc
