#include "fwmc/chain_model.hpp"

#include <algorithm>
#include <cmath>

#include "fwmc/error.hpp"

namespace fwmc {

ScalarTrace::ScalarTrace(std::vector<double> values) : values_(std::move(values)) {
  for (double v : values_) {
    if (!std::isfinite(v)) throw Error("non-finite trace value");
  }
}

TourSet::TourSet(std::vector<Tour> tours) : tours_(std::move(tours)) {
  for (const Tour& t : tours_) {
    if (t.length < 1) throw Error("tour length must be positive");
    if (!std::isfinite(t.sum)) throw Error("non-finite tour sum");
    total_length_ += t.length;
  }
}

namespace {

// floor(n^theta), snapping to the nearest integer when pow() lands within
// rounding error of it (pow(1000, 1/3) evaluates to 9.999999999999998).
std::int64_t batch_size_for(std::int64_t n, double theta) {
  const double x = std::pow(static_cast<double>(n), theta);
  const double nearest = std::round(x);
  if (std::abs(x - nearest) <= 1e-9 * std::max(1.0, nearest)) {
    return static_cast<std::int64_t>(nearest);
  }
  return static_cast<std::int64_t>(std::floor(x));
}

}  // namespace

BatchSchedule cbm_schedule(std::int64_t n, double theta) {
  if (!(theta > 0.0 && theta < 1.0)) throw Error("theta must lie in (0,1)");
  if (n < 4) throw Error("insufficient sample");
  const std::int64_t b = batch_size_for(n, theta);
  if (b < 1) throw Error("insufficient sample");
  const std::int64_t a = n / b;
  if (a < 2) throw Error("insufficient sample");
  return {a, b, theta};
}

BatchSchedule fixed_schedule(std::int64_t n, std::int64_t batches) {
  if (batches < 2) throw Error("insufficient batches");
  if (n < 2 * batches) throw Error("insufficient sample");
  return {batches, n / batches, std::nullopt};
}

void StoppingConfig::validate() const {
  if (!(epsilon > 0.0)) throw Error("epsilon must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw Error("delta must lie in (0,1)");
  if (n_star < 1) throw Error("n_star must be at least 1");
  if (penalty_c < 0.0) throw Error("penalty C must be nonnegative");
  if (penalty_c > 0.0 && !(penalty_k > 0.5)) throw Error("penalty k must exceed 1/2");
}

std::string to_string(StopReason reason) {
  switch (reason) {
    case StopReason::Converged: return "converged";
    case StopReason::Cap: return "cap";
    case StopReason::SourceExhausted: return "source exhausted";
  }
  return "unknown";
}

}  // namespace fwmc
