#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fwmc/chain_model.hpp"

namespace fwmc {

// Which reference distribution the interval uses.
enum class QuantileKind { StudentT, StandardNormal };

struct VarianceEstimate {
  double point = 0.0;   // ergodic average
  double sigma2 = 0.0;  // sigma^2_BM, or xi^2_RS for regenerative estimates
  QuantileKind quantile = QuantileKind::StudentT;
  std::int64_t dof = 0;           // a - 1 for batch means; unused otherwise
  std::int64_t sample_count = 0;  // a*b for batch means, R for RS
};

// Batch means over the first a*b values:
//   sigma2 = b/(a-1) * sum_j (Ybar_j - gbar)^2.
// Values past a*b are ignored.
VarianceEstimate batch_means(std::span<const double> values, const BatchSchedule& schedule);
VarianceEstimate batch_means(const ScalarTrace& trace, const BatchSchedule& schedule);

// Running prefix sums of a growing trace, so that batch means at any run
// length cost O(a) instead of O(n). Sums are kept in extended precision.
class PrefixSums {
 public:
  PrefixSums() : sums_{0.0L} {}
  void push(double x) { sums_.push_back(sums_.back() + x); }
  std::int64_t size() const { return static_cast<std::int64_t>(sums_.size()) - 1; }
  // Sum of values [begin, end).
  long double range(std::int64_t begin, std::int64_t end) const {
    return sums_[static_cast<std::size_t>(end)] - sums_[static_cast<std::size_t>(begin)];
  }

 private:
  std::vector<long double> sums_;
};

VarianceEstimate batch_means(const PrefixSums& sums, const BatchSchedule& schedule);

// Regenerative estimate: point = sum S / sum N and
//   xi2 = (1/Nbar^2) (1/R) sum_r (S_r - point * N_r)^2.
VarianceEstimate rs_variance(const TourSet& tours);

// t_{a-1, 1-delta/2} sigma/sqrt(n) for batch means, z_{1-delta/2} xi/sqrt(R)
// for RS. run_length is n (iterations) or R (tours) accordingly.
double half_width(const VarianceEstimate& est, double delta, std::int64_t run_length);

// The two halves of half_width, for callers that reuse the quantile.
double critical_value(const VarianceEstimate& est, double delta);
double half_width_from(const VarianceEstimate& est, double critical, std::int64_t run_length);

// Running co-moments of (N_r, S_r) so a regenerative estimate can be
// refreshed after every tour in O(1). Matches rs_variance to rounding.
class TourMoments {
public:
  void add(const Tour& tour);

  std::int64_t count() const { return count_; }
  std::int64_t total_length() const { return total_length_; }
  double total_sum() const { return total_sum_; }

  // Throws "insufficient tours" when fewer than two tours were added.
  VarianceEstimate estimate() const;

private:
  std::int64_t count_ = 0;
  std::int64_t total_length_ = 0;
  double total_sum_ = 0.0;
  double mean_n_ = 0.0;
  double mean_s_ = 0.0;
  double c_nn_ = 0.0;
  double c_ss_ = 0.0;
  double c_ns_ = 0.0;
};

}  // namespace fwmc
