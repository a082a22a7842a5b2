#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fwmc/chain_model.hpp"
#include "fwmc/variance.hpp"

namespace fwmc {

// p(n) = epsilon * I(n <= n_star) + c * n^(-k).
struct PenaltySpec {
  double epsilon = 0.005;
  std::int64_t n_star = 1;
  double c = 0.0;
  double k = 1.0;
};

PenaltySpec penalty_spec(const StoppingConfig& cfg);

double penalty(std::int64_t n, const PenaltySpec& spec);

// half_width + p(n) <= epsilon, and never while n <= n*.
bool should_stop(double half_width, std::int64_t n, const PenaltySpec& spec);

struct CheckpointPolicy {
  enum class Mode { EveryK, EveryTour, Geometric };

  Mode mode = Mode::EveryK;
  std::int64_t interval = 100;
  double growth = 1.1;
  std::int64_t first = 100;

  static CheckpointPolicy every(std::int64_t k) { return {Mode::EveryK, k, 1.0, k}; }
  static CheckpointPolicy every_tour() { return {Mode::EveryTour, 1, 1.0, 1}; }
  static CheckpointPolicy geometric(double growth, std::int64_t first = 100) {
    return {Mode::Geometric, 1, growth, first};
  }
};

// Strictly increasing sequence of checkpoint counts for a policy.
class CheckpointSchedule {
public:
  explicit CheckpointSchedule(const CheckpointPolicy& policy);

  // True when count is the next checkpoint; advances past it.
  bool due(std::int64_t count);
  std::int64_t next() const { return next_; }

private:
  CheckpointPolicy policy_;
  std::int64_t next_;
};

struct FixedBatchMeans {
  std::int64_t batches = 30;
};
struct ConsistentBatchMeans {
  double theta = 0.5;
};
struct Regenerative {};

using Estimator = std::variant<FixedBatchMeans, ConsistentBatchMeans, Regenerative>;
using BatchEstimator = std::variant<FixedBatchMeans, ConsistentBatchMeans>;

// Short label: "bm30", "cbm(0.5)", "rs".
std::string label(const Estimator& est);

// Schedule for n observations, or nullopt when the estimator cannot run yet.
std::optional<BatchSchedule> try_schedule(const BatchEstimator& est, std::int64_t n);

// Batch-means fixed-width rule fed one observation at a time.
class BatchMeansMonitor {
public:
  BatchMeansMonitor(BatchEstimator est, StoppingConfig cfg,
                    CheckpointPolicy policy = CheckpointPolicy::every(100));

  // Returns the report the first time the rule is satisfied; afterwards the
  // monitor ignores further input.
  std::optional<FixedWidthReport> observe(double x);

  bool stopped() const { return stopped_; }
  std::int64_t count() const { return sums_.size(); }
  // Latest report with the given reason; used when a run is cut off.
  FixedWidthReport snapshot(StopReason reason) const;

private:
  std::optional<FixedWidthReport> evaluate();

  BatchEstimator est_;
  StoppingConfig cfg_;
  PenaltySpec penalty_;
  CheckpointSchedule checkpoints_;
  PrefixSums sums_;
  std::string label_;
  std::int64_t critical_dof_ = -1;
  double critical_ = 0.0;
  std::optional<FixedWidthReport> last_;
  bool stopped_ = false;
};

// Regenerative fixed-width rule: observations plus the regeneration flag of
// the transition leaving each one. The rule is applied to R, the tour count.
class RegenerativeMonitor {
public:
  explicit RegenerativeMonitor(StoppingConfig cfg,
                               CheckpointPolicy policy = CheckpointPolicy::every_tour());

  std::optional<FixedWidthReport> observe(double x, bool regenerates_after);
  // Feed a complete tour directly.
  std::optional<FixedWidthReport> observe_tour(const Tour& tour);

  bool stopped() const { return stopped_; }
  std::int64_t iterations() const { return iterations_; }
  std::int64_t tours() const { return moments_.count(); }
  FixedWidthReport snapshot(StopReason reason) const;

private:
  StoppingConfig cfg_;
  PenaltySpec penalty_;
  CheckpointSchedule checkpoints_;
  TourMoments moments_;
  Tour open_{0, 0.0};
  std::int64_t iterations_ = 0;
  std::optional<FixedWidthReport> last_;
  bool stopped_ = false;
};

using ScalarSource = std::function<std::optional<double>()>;
using TourSource = std::function<std::optional<Tour>()>;

// Draws from source until the rule holds or cap iterations are used.
// Throws "source exhausted" if the source runs dry first.
FixedWidthReport run_until_width(const ScalarSource& source, const BatchEstimator& est,
                                 const StoppingConfig& cfg,
                                 CheckpointPolicy policy = CheckpointPolicy::every(100),
                                 std::int64_t cap = 10'000'000);

// Regenerative variant; cap counts iterations (sum of tour lengths).
FixedWidthReport run_until_width(const TourSource& source, const StoppingConfig& cfg,
                                 CheckpointPolicy policy = CheckpointPolicy::every_tour(),
                                 std::int64_t cap = 10'000'000);

}  // namespace fwmc
