#include "fwmc/diagnostics.hpp"

#include <cmath>
#include <limits>

#include "fwmc/error.hpp"
#include "fwmc/quantiles.hpp"
#include "fwmc/variance.hpp"

namespace fwmc {

void GewekeConfig::validate() const {
  if (!(frac_a > 0.0 && frac_b > 0.0 && frac_a + frac_b <= 1.0)) {
    throw Error("window fractions must be positive and sum to at most 1");
  }
  if (min_n < 20) throw Error("min_n must be at least 20");
  if (!(p_threshold >= 0.0 && p_threshold < 1.0)) throw Error("p threshold must lie in [0,1)");
}

namespace {

std::int64_t window_length(double frac, std::int64_t n) {
  return static_cast<std::int64_t>(std::floor(frac * static_cast<double>(n) + 1e-9));
}

VarianceEstimate window_estimate(std::span<const double> window) {
  const auto n = static_cast<std::int64_t>(window.size());
  if (n < 4) throw Error("insufficient window");
  try {
    return batch_means(window, cbm_schedule(n, 0.5));
  } catch (const Error&) {
    throw Error("insufficient window");
  }
}

double window_mean(std::span<const double> window) {
  double s = 0.0;
  for (double v : window) s += v;
  return s / static_cast<double>(window.size());
}

}  // namespace

GewekeResult geweke_z(std::span<const double> values, const GewekeConfig& cfg) {
  cfg.validate();
  const auto n = static_cast<std::int64_t>(values.size());
  if (n < cfg.min_n) throw Error("insufficient sample");
  const std::int64_t na = window_length(cfg.frac_a, n);
  const std::int64_t nb = window_length(cfg.frac_b, n);
  const auto early = values.first(static_cast<std::size_t>(na));
  const auto late = values.last(static_cast<std::size_t>(nb));

  const VarianceEstimate ea = window_estimate(early);
  const VarianceEstimate eb = window_estimate(late);
  const double diff = window_mean(early) - window_mean(late);
  const double se2 = ea.sigma2 / static_cast<double>(na) + eb.sigma2 / static_cast<double>(nb);

  GewekeResult r;
  if (se2 <= 0.0) {
    r.z = diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
  } else {
    r.z = diff / std::sqrt(se2);
  }
  r.p_value = 2.0 * normal_cdf(-std::abs(r.z));
  return r;
}

GewekeResult geweke_z(const ScalarTrace& trace, const GewekeConfig& cfg) {
  return geweke_z(trace.values(), cfg);
}

GewekeMonitor::GewekeMonitor(GewekeConfig cfg, std::int64_t interval)
    : cfg_(cfg), interval_(interval) {
  cfg_.validate();
  if (interval_ < 1) throw Error("checkpoint interval must be positive");
}

std::optional<GewekeStop> GewekeMonitor::observe(double x) {
  if (stopped_) return std::nullopt;
  values_.push_back(x);
  sum_ += x;
  const std::int64_t n = count();
  if (n < cfg_.min_n || n % interval_ != 0) return std::nullopt;
  GewekeResult r;
  try {
    r = geweke_z(values_, cfg_);
  } catch (const Error&) {
    return std::nullopt;
  }
  last_p_ = r.p_value;
  if (!(r.p_value > cfg_.p_threshold)) return std::nullopt;
  stopped_ = true;
  return snapshot();
}

GewekeStop GewekeMonitor::snapshot() const {
  GewekeStop s;
  s.n = count();
  s.estimate = values_.empty() ? 0.0 : sum_ / static_cast<double>(values_.size());
  s.p_value = last_p_;
  s.converged = stopped_;
  return s;
}

GewekeStop gd_stopping(const ScalarSource& source, const GewekeConfig& cfg, std::int64_t interval,
                       std::int64_t cap) {
  GewekeMonitor monitor(cfg, interval);
  while (monitor.count() < cap) {
    const std::optional<double> x = source();
    if (!x) throw Error("source exhausted");
    if (auto stop = monitor.observe(*x)) return *stop;
  }
  return monitor.snapshot();
}

}  // namespace fwmc
