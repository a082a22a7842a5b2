#include "fwmc/regeneration.hpp"

#include <algorithm>
#include <cmath>

#include "fwmc/error.hpp"

namespace fwmc {

double clamp_probability(double raw, RegenDiagnostics* diag) {
  if (std::isnan(raw)) throw Error("regeneration probability is NaN");
  if (diag != nullptr) {
    diag->max_raw = std::max(diag->max_raw, raw);
    if (raw > 1.0 + RegenDiagnostics::tolerance) ++diag->excess_count;
  }
  return std::clamp(raw, 0.0, 1.0);
}

double indep_mh_regen_prob(double ratio_x, double ratio_y, double c) {
  if (!(c > 0.0)) throw Error("regeneration constant c must be positive");
  if (!(ratio_x > 0.0 && ratio_y > 0.0) || !std::isfinite(ratio_x) || !std::isfinite(ratio_y)) {
    throw Error("density ratio must be finite and positive");
  }
  const double lo = std::min(ratio_x, ratio_y);
  const double hi = std::max(ratio_x, ratio_y);
  if (lo > c) return c / lo;
  if (hi < c) return hi / c;
  return 1.0;
}

void GibbsRegenSpec::validate() const {
  if (theta_tilde.size() < 2) throw Error("theta_tilde needs at least two components");
  for (double t : theta_tilde) {
    if (!std::isfinite(t)) throw Error("theta_tilde must be finite");
  }
  if (!(0.0 < d1 && d1 < d2 && std::isfinite(d2))) throw Error("need 0 < d1 < d2");
  if (!(d3 < d4 && std::isfinite(d3) && std::isfinite(d4))) throw Error("need d3 < d4");
}

namespace {

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// V(theta, mu) = sum_i (theta_i - mu)^2.
double spread(std::span<const double> theta, double mu) {
  double s = 0.0;
  for (double t : theta) s += (t - mu) * (t - mu);
  return s;
}

}  // namespace

double gibbs_regen_prob(std::span<const double> theta_prev, double lambda, double mu,
                        std::span<const double> /*theta*/, const GibbsRegenSpec& spec,
                        RegenDiagnostics* diag) {
  if (!(lambda > 0.0)) throw Error("lambda must be positive");
  if (theta_prev.size() != spec.theta_tilde.size()) throw Error("theta dimension mismatch");
  if (lambda < spec.d1 || lambda > spec.d2 || mu < spec.d3 || mu > spec.d4) return 0.0;

  const std::span<const double> tilde(spec.theta_tilde);
  // Infimum over D of f(lambda, mu | theta') / f(lambda, mu | tilde): the
  // exponent is linear in mu and monotone in 1/lambda, so it sits at a corner.
  const double mu_hat = mean_of(theta_prev) <= mean_of(tilde) ? spec.d4 : spec.d3;
  const double v_tilde_hat = spread(tilde, mu_hat);
  const double v_prev_hat = spread(theta_prev, mu_hat);
  const double lambda_hat = v_prev_hat <= v_tilde_hat ? spec.d2 : spec.d1;
  const double log_inf = (v_tilde_hat - v_prev_hat) / (2.0 * lambda_hat);

  // f(lambda, mu | tilde) / f(lambda, mu | theta') on the kernel scale used
  // for the infimum; lambda^{...} e^{-c/lambda} factors cancel.
  const double log_ratio = (spread(theta_prev, mu) - spread(tilde, mu)) / (2.0 * lambda);

  return clamp_probability(std::exp(log_inf + log_ratio), diag);
}

TourSet tours_from_run(const ScalarTrace& trace, const std::vector<bool>& flags) {
  // The transition out of the last value may not have happened yet.
  const auto nflags = static_cast<std::int64_t>(flags.size());
  if (nflags != trace.size() && nflags != trace.size() - 1) {
    throw Error("flag count must match trace length");
  }
  std::vector<Tour> tours;
  TourBuilder builder;
  for (std::size_t i = 0; i < flags.size(); ++i) {
    if (auto t = builder.push(trace[i], flags[i])) tours.push_back(*t);
  }
  if (tours.empty()) throw Error("no regenerations observed");
  return TourSet(std::move(tours));
}

std::optional<Tour> TourBuilder::push(double value, bool regenerates_after) {
  open_.length += 1;
  open_.sum += value;
  if (!regenerates_after) return std::nullopt;
  const Tour done = open_;
  open_ = Tour{0, 0.0};
  return done;
}

}  // namespace fwmc
