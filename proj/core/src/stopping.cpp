#include "fwmc/stopping.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <type_traits>

#include "fwmc/error.hpp"

namespace fwmc {

PenaltySpec penalty_spec(const StoppingConfig& cfg) {
  cfg.validate();
  return {cfg.epsilon, cfg.n_star, cfg.penalty_c, cfg.penalty_k};
}

double penalty(std::int64_t n, const PenaltySpec& spec) {
  double p = n <= spec.n_star ? spec.epsilon : 0.0;
  if (spec.c > 0.0) p += spec.c * std::pow(static_cast<double>(n), -spec.k);
  return p;
}

bool should_stop(double half_width, std::int64_t n, const PenaltySpec& spec) {
  // At n <= n* the penalty alone uses up epsilon; a zero-width interval
  // (e.g. a constant stretch of output) must not slip through on equality.
  if (n <= spec.n_star) return false;
  return half_width + penalty(n, spec) <= spec.epsilon;
}

CheckpointSchedule::CheckpointSchedule(const CheckpointPolicy& policy) : policy_(policy) {
  switch (policy_.mode) {
    case CheckpointPolicy::Mode::EveryK:
      if (policy_.interval < 1) throw Error("checkpoint interval must be positive");
      next_ = policy_.interval;
      break;
    case CheckpointPolicy::Mode::EveryTour:
      next_ = 1;
      break;
    case CheckpointPolicy::Mode::Geometric:
      if (!(policy_.growth > 1.0)) throw Error("geometric growth must exceed 1");
      if (policy_.first < 1) throw Error("first checkpoint must be positive");
      next_ = policy_.first;
      break;
  }
}

bool CheckpointSchedule::due(std::int64_t count) {
  if (count < next_) return false;
  switch (policy_.mode) {
    case CheckpointPolicy::Mode::EveryK:
      next_ = (count / policy_.interval + 1) * policy_.interval;
      break;
    case CheckpointPolicy::Mode::EveryTour:
      next_ = count + 1;
      break;
    case CheckpointPolicy::Mode::Geometric: {
      const auto grown = static_cast<std::int64_t>(std::ceil(static_cast<double>(count) * policy_.growth));
      next_ = std::max(count + 1, grown);
      break;
    }
  }
  return true;
}

namespace {

std::string format_theta(double theta) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", theta);
  return buf;
}

Estimator widen(const BatchEstimator& est) {
  return std::visit([](const auto& e) -> Estimator { return e; }, est);
}

}  // namespace

std::string label(const Estimator& est) {
  return std::visit(
      [](const auto& e) -> std::string {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, FixedBatchMeans>) {
          return "bm" + std::to_string(e.batches);
        } else if constexpr (std::is_same_v<T, ConsistentBatchMeans>) {
          return "cbm(" + format_theta(e.theta) + ")";
        } else {
          return "rs";
        }
      },
      est);
}

std::optional<BatchSchedule> try_schedule(const BatchEstimator& est, std::int64_t n) {
  if (const auto* bm = std::get_if<FixedBatchMeans>(&est)) {
    if (bm->batches < 2 || n < 2 * bm->batches) return std::nullopt;
    return fixed_schedule(n, bm->batches);
  }
  const double theta = std::get<ConsistentBatchMeans>(est).theta;
  if (n < 4) return std::nullopt;
  try {
    return cbm_schedule(n, theta);
  } catch (const Error&) {
    return std::nullopt;
  }
}

BatchMeansMonitor::BatchMeansMonitor(BatchEstimator est, StoppingConfig cfg, CheckpointPolicy policy)
    : est_(est), cfg_(cfg), penalty_(penalty_spec(cfg)), checkpoints_(policy), label_(label(widen(est))) {
  if (policy.mode == CheckpointPolicy::Mode::EveryTour) {
    throw Error("batch means cannot be checked per tour");
  }
  if (const auto* cbm = std::get_if<ConsistentBatchMeans>(&est_)) {
    if (!(cbm->theta > 0.0 && cbm->theta < 1.0)) throw Error("theta must lie in (0,1)");
  } else if (std::get<FixedBatchMeans>(est_).batches < 2) {
    throw Error("insufficient batches");
  }
}

std::optional<FixedWidthReport> BatchMeansMonitor::observe(double x) {
  if (stopped_) return std::nullopt;
  if (!std::isfinite(x)) throw Error("non-finite value");
  sums_.push(x);
  if (!checkpoints_.due(count())) return std::nullopt;
  return evaluate();
}

std::optional<FixedWidthReport> BatchMeansMonitor::evaluate() {
  const std::int64_t n = count();
  const auto schedule = try_schedule(est_, n);
  if (!schedule) return std::nullopt;

  const VarianceEstimate est = batch_means(sums_, *schedule);
  FixedWidthReport report;
  report.estimate = est.point;
  report.variance_estimate = est.sigma2;
  if (est.dof != critical_dof_) {
    critical_ = critical_value(est, cfg_.delta);
    critical_dof_ = est.dof;
  }
  report.half_width = half_width_from(est, critical_, est.sample_count);
  report.iterations = n;
  report.sample_count = est.sample_count;
  report.dof = est.dof;
  report.method = label_;
  last_ = report;

  if (!should_stop(report.half_width, n, penalty_)) return std::nullopt;
  stopped_ = true;
  return report;
}

FixedWidthReport BatchMeansMonitor::snapshot(StopReason reason) const {
  FixedWidthReport report;
  if (last_) report = *last_;
  report.method = label_;
  report.iterations = count();
  report.reason = reason;
  return report;
}

RegenerativeMonitor::RegenerativeMonitor(StoppingConfig cfg, CheckpointPolicy policy)
    : cfg_(cfg), penalty_(penalty_spec(cfg)), checkpoints_(policy) {}

std::optional<FixedWidthReport> RegenerativeMonitor::observe(double x, bool regenerates_after) {
  if (stopped_) return std::nullopt;
  open_.length += 1;
  open_.sum += x;
  if (!regenerates_after) return std::nullopt;
  const Tour done = open_;
  open_ = Tour{0, 0.0};
  return observe_tour(done);
}

std::optional<FixedWidthReport> RegenerativeMonitor::observe_tour(const Tour& tour) {
  if (stopped_) return std::nullopt;
  moments_.add(tour);
  iterations_ = moments_.total_length();
  const std::int64_t r = moments_.count();
  if (!checkpoints_.due(r) || r < 2) return std::nullopt;

  const VarianceEstimate est = moments_.estimate();
  FixedWidthReport report;
  report.estimate = est.point;
  report.variance_estimate = est.sigma2;
  report.half_width = half_width(est, cfg_.delta, r);
  report.iterations = iterations_;
  report.tours = r;
  report.sample_count = r;
  report.dof = 0;
  report.method = "rs";
  last_ = report;

  if (!should_stop(report.half_width, r, penalty_)) return std::nullopt;
  stopped_ = true;
  return report;
}

FixedWidthReport RegenerativeMonitor::snapshot(StopReason reason) const {
  FixedWidthReport report;
  if (last_) report = *last_;
  report.method = "rs";
  report.iterations = iterations_;
  report.tours = moments_.count();
  report.reason = reason;
  return report;
}

FixedWidthReport run_until_width(const ScalarSource& source, const BatchEstimator& est,
                                 const StoppingConfig& cfg, CheckpointPolicy policy,
                                 std::int64_t cap) {
  if (cap < cfg.n_star) throw Error("cap must be at least n_star");
  BatchMeansMonitor monitor(est, cfg, policy);
  while (monitor.count() < cap) {
    const std::optional<double> x = source();
    if (!x) throw Error("source exhausted");
    if (auto report = monitor.observe(*x)) return *report;
  }
  return monitor.snapshot(StopReason::Cap);
}

FixedWidthReport run_until_width(const TourSource& source, const StoppingConfig& cfg,
                                 CheckpointPolicy policy, std::int64_t cap) {
  if (cap < cfg.n_star) throw Error("cap must be at least n_star");
  RegenerativeMonitor monitor(cfg, policy);
  while (monitor.iterations() < cap) {
    const std::optional<Tour> tour = source();
    if (!tour) throw Error("source exhausted");
    if (auto report = monitor.observe_tour(*tour)) return *report;
  }
  return monitor.snapshot(StopReason::Cap);
}

}  // namespace fwmc
