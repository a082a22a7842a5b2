#include "fwmc/samplers.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "fwmc/error.hpp"

namespace fwmc {

double pareto_draw(double alpha, double shape, double u) {
  if (!(shape > 0.0)) throw Error("Pareto shape must be positive");
  if (!(u > 0.0 && u <= 1.0)) throw Error("uniform variate must lie in (0,1]");
  return alpha * std::pow(u, -1.0 / shape);
}

void ParetoIndepMH::validate() const {
  if (!(alpha > 0.0)) throw Error("Pareto scale must be positive");
  if (!(beta > 1.0)) throw Error("target shape must exceed 1");
  if (!(lambda > 0.0 && lambda <= beta)) throw Error("proposal shape must lie in (0, beta]");
  if (!(c > 0.0)) throw Error("regeneration constant c must be positive");
}

double ParetoIndepMH::density_ratio(double x) const {
  return beta / lambda * std::pow(alpha, beta - lambda) * std::pow(x, lambda - beta);
}

double ParetoIndepMH::accept_prob(double x, double y) const {
  return std::min(1.0, std::pow(x / y, beta - lambda));
}

MHStep pareto_mh_step(const ParetoIndepMH& sampler, double x, Rng& rng) {
  const double y = pareto_draw(sampler.alpha, sampler.lambda, rng.uniform());
  MHStep step;
  step.accept_prob = sampler.accept_prob(x, y);
  step.accepted = rng.uniform() < step.accept_prob;
  step.state = step.accepted ? y : x;
  step.regen_prob = step.accepted ? indep_mh_regen_prob(sampler.density_ratio(x),
                                                        sampler.density_ratio(y), sampler.c)
                                  : 0.0;
  return step;
}

double pareto_initial_state(const ParetoIndepMH& sampler, Rng& rng) {
  for (int i = 0; i < 1'000'000; ++i) {
    const double y = pareto_draw(sampler.alpha, sampler.lambda, rng.uniform());
    if (rng.uniform() < std::min(1.0, sampler.density_ratio(y) / sampler.c)) return y;
  }
  throw Error("initial draw from Q did not terminate");
}

HierModel::HierModel(std::vector<double> y, double a, double b, double c)
    : y_(std::move(y)), a_(a), b_(b), c_(c) {
  if (y_.size() < 2) throw Error("hierarchical model needs at least two observations");
  if (!(a_ > 0.0 && b_ > 0.0 && c_ > 0.0)) throw Error("model constants must be positive");
  for (double v : y_) {
    if (!std::isfinite(v)) throw Error("non-finite observation");
    ybar_ += v;
  }
  ybar_ /= static_cast<double>(y_.size());
  for (double v : y_) s2_ += (v - ybar_) * (v - ybar_);
  log_bound_ = log_accept_weight(accept_weight_argmax());
}

double HierModel::log_lambda_posterior(double lambda) const {
  const double k = static_cast<double>(y_.size());
  return -(b_ + 1.0) * std::log(lambda) - 0.5 * (k - 1.0) * std::log(lambda + a_) - c_ / lambda -
         s2_ / (2.0 * (lambda + a_));
}

double HierModel::log_accept_weight(double lambda) const {
  const double k = static_cast<double>(y_.size());
  return 0.5 * (1.0 - k) * std::log(lambda + a_) - s2_ / (2.0 * (lambda + a_));
}

double HierModel::accept_weight_argmax() const {
  const double k = static_cast<double>(y_.size());
  return std::max(0.0, s2_ / (k - 1.0) - a_);
}

namespace {

void check_finite(double v) {
  if (!std::isfinite(v)) throw Error("non-finite draw");
}

void draw_theta(const HierModel& model, double lambda, double mu, std::vector<double>& theta,
                Rng& rng) {
  theta.resize(model.size());
  for (std::size_t i = 0; i < model.size(); ++i) {
    const NormalParams cond = theta_conditional(model, lambda, mu, i);
    theta[i] = rng.normal(cond.mean, cond.variance);
    check_finite(theta[i]);
  }
}

struct Summary {
  double mean = 0.0;
  double ss = 0.0;  // sum of squared deviations
};

Summary summarize(std::span<const double> v) {
  Summary s;
  for (double x : v) s.mean += x;
  s.mean /= static_cast<double>(v.size());
  for (double x : v) s.ss += (x - s.mean) * (x - s.mean);
  return s;
}

}  // namespace

InverseGammaParams lambda_conditional(const HierModel& model, std::span<const double> theta) {
  const double k = static_cast<double>(model.size());
  const Summary th = summarize(theta);
  return {model.b() + 0.5 * (k - 1.0), model.c() + 0.5 * th.ss};
}

NormalParams mu_conditional(std::span<const double> theta, double lambda) {
  const Summary th = summarize(theta);
  return {th.mean, lambda / static_cast<double>(theta.size())};
}

NormalParams theta_conditional(const HierModel& model, double lambda, double mu, std::size_t i) {
  const double a = model.a();
  return {(lambda * model.y()[i] + a * mu) / (lambda + a), a * lambda / (lambda + a)};
}

void gibbs_sweep(const HierModel& model, GibbsState& state, Rng& rng) {
  if (!(state.lambda > 0.0)) throw Error("lambda must be positive");
  if (state.theta.size() != model.size()) throw Error("theta dimension mismatch");
  const InverseGammaParams lam = lambda_conditional(model, state.theta);
  state.lambda = rng.inverse_gamma(lam.shape, lam.rate);
  check_finite(state.lambda);
  const NormalParams m = mu_conditional(state.theta, state.lambda);
  state.mu = rng.normal(m.mean, m.variance);
  check_finite(state.mu);
  draw_theta(model, state.lambda, state.mu, state.theta, rng);
}

GibbsState iid_posterior_draw(const HierModel& model, Rng& rng, AcceptRejectStats* stats) {
  const double log_m = model.log_accept_bound();
  double lambda = 0.0;
  bool accepted = false;
  for (int i = 0; i < 1'000'000 && !accepted; ++i) {
    lambda = rng.inverse_gamma(model.b(), model.c());
    const double log_h = model.log_accept_weight(lambda);
    if (stats != nullptr) {
      ++stats->proposals;
      if (log_h > log_m + 1e-12) ++stats->bound_violations;
    }
    accepted = std::log(rng.uniform()) < log_h - log_m;
  }
  if (!accepted) throw Error("accept-reject exceeded 10^6 proposals");
  if (stats != nullptr) ++stats->accepted;

  GibbsState s;
  s.lambda = lambda;
  const double k = static_cast<double>(model.size());
  s.mu = rng.normal(model.ybar(), (lambda + model.a()) / k);
  draw_theta(model, s.lambda, s.mu, s.theta, rng);
  return s;
}

GibbsRegenSpec gibbs_regen_from_pilot(const HierModel& model, std::span<const GibbsState> pilot) {
  if (pilot.size() < 2) throw Error("pilot run needs at least two sweeps");
  const double n = static_cast<double>(pilot.size());
  std::vector<double> lambdas;
  std::vector<double> mus;
  lambdas.reserve(pilot.size());
  mus.reserve(pilot.size());
  std::vector<double> theta_mean(model.size(), 0.0);
  for (const GibbsState& s : pilot) {
    lambdas.push_back(s.lambda);
    mus.push_back(s.mu);
    for (std::size_t i = 0; i < model.size(); ++i) theta_mean[i] += s.theta[i] / n;
  }
  const Summary l = summarize(lambdas);
  const Summary m = summarize(mus);
  const double sd_l = std::sqrt(l.ss / (n - 1.0));
  const double sd_m = std::sqrt(m.ss / (n - 1.0));

  GibbsRegenSpec spec;
  spec.theta_tilde = std::move(theta_mean);
  spec.d1 = std::max(0.01, l.mean - 0.5 * sd_l);
  spec.d2 = l.mean + 0.5 * sd_l;
  spec.d3 = m.mean - sd_m;
  spec.d4 = m.mean + sd_m;
  spec.a = model.a();
  spec.b = model.b();
  spec.c = model.c();
  spec.validate();
  return spec;
}

GibbsState gibbs_initial_state(const HierModel& model, const GibbsRegenSpec& spec, Rng& rng) {
  const double k = static_cast<double>(model.size());
  const Summary th = summarize(spec.theta_tilde);
  for (int i = 0; i < 1'000'000; ++i) {
    const double lambda = rng.inverse_gamma(model.b() + 0.5 * (k - 1.0), model.c() + 0.5 * th.ss);
    const double mu = rng.normal(th.mean, lambda / k);
    if (lambda < spec.d1 || lambda > spec.d2 || mu < spec.d3 || mu > spec.d4) continue;
    GibbsState s;
    s.lambda = lambda;
    s.mu = mu;
    draw_theta(model, lambda, mu, s.theta, rng);
    return s;
  }
  throw Error("initial draw from Q did not terminate");
}

std::vector<double> read_data_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open data file " + path.string());
  std::vector<double> values;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t");
    const std::string field = line.substr(first, last - first + 1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(v)) {
      throw Error("bad value on line " + std::to_string(lineno) + " of " + path.string());
    }
    values.push_back(v);
  }
  return values;
}

void write_data_csv(const std::filesystem::path& path, std::span<const double> values) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  char buf[64];
  for (double v : values) {
    std::snprintf(buf, sizeof buf, "%.17g\n", v);
    out << buf;
  }
}

std::vector<double> synthetic_hier_data(std::uint64_t seed, std::size_t k, double mu, double a,
                                        double b, double c) {
  Rng rng(seed);
  const double lambda = rng.inverse_gamma(b, c);
  std::vector<double> y(k);
  for (double& v : y) {
    const double theta = rng.normal(mu, lambda);
    v = rng.normal(theta, a);
  }
  return y;
}

void TwoStateChain::validate() const {
  if (!(p > 0.0 && p < 1.0 && q > 0.0 && q < 1.0)) {
    throw Error("two-state transition probabilities must lie in (0,1)");
  }
}

int two_state_step(const TwoStateChain& chain, int state, Rng& rng) {
  const double u = rng.uniform();
  if (state == 0) return u < chain.p ? 1 : 0;
  return u < chain.q ? 0 : 1;
}

ParetoSplitChain::ParetoSplitChain(ParetoIndepMH sampler, std::uint64_t seed)
    : sampler_(sampler), rng_(seed) {
  sampler_.validate();
  state_ = pareto_initial_state(sampler_, rng_);
}

bool ParetoSplitChain::advance() {
  const MHStep step = pareto_mh_step(sampler_, state_, rng_);
  state_ = step.state;
  // One uniform per transition whether or not the move was accepted.
  const double u = rng_.uniform();
  clamp_probability(step.regen_prob, &diag_);
  return u < step.regen_prob;
}

GibbsSplitChain::GibbsSplitChain(const HierModel& model, GibbsRegenSpec spec,
                                 std::size_t coordinate, std::uint64_t seed)
    : model_(model), spec_(std::move(spec)), coordinate_(coordinate), rng_(seed) {
  spec_.validate();
  if (coordinate_ >= model_.size()) throw Error("coordinate out of range");
  state_ = gibbs_initial_state(model_, spec_, rng_);
}

bool GibbsSplitChain::advance() {
  prev_theta_ = state_.theta;
  gibbs_sweep(model_, state_, rng_);
  const double p = gibbs_regen_prob(prev_theta_, state_.lambda, state_.mu, state_.theta, spec_, &diag_);
  return rng_.uniform() < p;
}

TwoStateSplitChain::TwoStateSplitChain(TwoStateChain chain, std::uint64_t seed, int atom)
    : chain_(chain), rng_(seed), atom_(atom), state_(atom) {
  chain_.validate();
  if (atom != 0 && atom != 1) throw Error("atom must be 0 or 1");
}

bool TwoStateSplitChain::advance() {
  state_ = two_state_step(chain_, state_, rng_);
  return atom_regen(state_, atom_);
}

}  // namespace fwmc
