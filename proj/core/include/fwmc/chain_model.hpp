#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fwmc {

// Values g(X_0), g(X_1), ... of a scalar functional along one chain run.
class ScalarTrace {
public:
  ScalarTrace() = default;
  // Throws fwmc::Error if any value is not finite.
  explicit ScalarTrace(std::vector<double> values);

  std::span<const double> values() const { return values_; }
  std::int64_t size() const { return static_cast<std::int64_t>(values_.size()); }
  double operator[](std::size_t i) const { return values_[i]; }

private:
  std::vector<double> values_;
};

// One regeneration tour: its length N_r and the functional summed over it, S_r.
struct Tour {
  std::int64_t length = 1;
  double sum = 0.0;

  friend bool operator==(const Tour&, const Tour&) = default;
};

class TourSet {
public:
  TourSet() = default;
  explicit TourSet(std::vector<Tour> tours);

  std::span<const Tour> tours() const { return tours_; }
  std::int64_t count() const { return static_cast<std::int64_t>(tours_.size()); }
  // tau_R, the number of chain iterations covered by the tours.
  std::int64_t total_length() const { return total_length_; }

private:
  std::vector<Tour> tours_;
  std::int64_t total_length_ = 0;
};

// a batches of b consecutive observations; theta is set for CBM schedules.
struct BatchSchedule {
  std::int64_t batches = 0;
  std::int64_t batch_size = 0;
  std::optional<double> theta;

  std::int64_t consumed() const { return batches * batch_size; }
};

// b = floor(n^theta), a = floor(n/b). Throws "insufficient sample" when a < 2.
BatchSchedule cbm_schedule(std::int64_t n, double theta);

// a as given, b = floor(n/a). Throws "insufficient sample" when n < 2a.
BatchSchedule fixed_schedule(std::int64_t n, std::int64_t batches);

struct StoppingConfig {
  double epsilon = 0.005;
  double delta = 0.05;
  std::int64_t n_star = 1;  // R* when the rule is applied to tours
  double penalty_c = 0.0;
  double penalty_k = 1.0;

  void validate() const;
};

enum class StopReason { Converged, Cap, SourceExhausted };

std::string to_string(StopReason reason);

struct FixedWidthReport {
  double estimate = 0.0;
  double variance_estimate = 0.0;
  double half_width = 0.0;
  std::int64_t iterations = 0;
  std::optional<std::int64_t> tours;
  // Observations (a*b) or tours (R) behind the interval, and the t degrees
  // of freedom (0 for a normal quantile).
  std::int64_t sample_count = 0;
  std::int64_t dof = 0;
  std::string method;
  std::uint64_t seed = 0;
  StopReason reason = StopReason::Converged;

  bool converged() const { return reason == StopReason::Converged; }
};

}  // namespace fwmc
