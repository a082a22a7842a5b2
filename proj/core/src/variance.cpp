#include "fwmc/variance.hpp"

#include <cmath>
#include <vector>

#include "fwmc/error.hpp"
#include "fwmc/quantiles.hpp"

namespace fwmc {

VarianceEstimate batch_means(std::span<const double> values, const BatchSchedule& schedule) {
  const std::int64_t a = schedule.batches;
  const std::int64_t b = schedule.batch_size;
  if (a < 2) throw Error("insufficient batches");
  if (b < 1 || a * b > static_cast<std::int64_t>(values.size())) {
    throw Error("insufficient sample");
  }

  std::vector<double> means(static_cast<std::size_t>(a));
  double grand = 0.0;
  for (std::int64_t j = 0; j < a; ++j) {
    double s = 0.0;
    for (std::int64_t i = j * b; i < (j + 1) * b; ++i) s += values[static_cast<std::size_t>(i)];
    means[static_cast<std::size_t>(j)] = s / static_cast<double>(b);
    grand += means[static_cast<std::size_t>(j)];
  }
  grand /= static_cast<double>(a);

  double ss = 0.0;
  for (double m : means) ss += (m - grand) * (m - grand);

  VarianceEstimate est;
  est.point = grand;
  est.sigma2 = static_cast<double>(b) / static_cast<double>(a - 1) * ss;
  est.quantile = QuantileKind::StudentT;
  est.dof = a - 1;
  est.sample_count = a * b;
  return est;
}

VarianceEstimate batch_means(const ScalarTrace& trace, const BatchSchedule& schedule) {
  return batch_means(trace.values(), schedule);
}

VarianceEstimate batch_means(const PrefixSums& sums, const BatchSchedule& schedule) {
  const std::int64_t a = schedule.batches;
  const std::int64_t b = schedule.batch_size;
  if (a < 2) throw Error("insufficient batches");
  if (b < 1 || a * b > sums.size()) throw Error("insufficient sample");

  const double grand = static_cast<double>(sums.range(0, a * b) / static_cast<long double>(a * b));
  double ss = 0.0;
  for (std::int64_t j = 0; j < a; ++j) {
    const double m = static_cast<double>(sums.range(j * b, (j + 1) * b) / static_cast<long double>(b));
    ss += (m - grand) * (m - grand);
  }

  VarianceEstimate est;
  est.point = grand;
  est.sigma2 = static_cast<double>(b) / static_cast<double>(a - 1) * ss;
  est.quantile = QuantileKind::StudentT;
  est.dof = a - 1;
  est.sample_count = a * b;
  return est;
}

VarianceEstimate rs_variance(const TourSet& tours) {
  const std::int64_t r = tours.count();
  if (r < 2) throw Error("insufficient tours");

  double total_sum = 0.0;
  for (const Tour& t : tours.tours()) total_sum += t.sum;
  const double total_len = static_cast<double>(tours.total_length());
  const double point = total_sum / total_len;
  const double nbar = total_len / static_cast<double>(r);

  double ss = 0.0;
  for (const Tour& t : tours.tours()) {
    const double resid = t.sum - point * static_cast<double>(t.length);
    ss += resid * resid;
  }

  VarianceEstimate est;
  est.point = point;
  est.sigma2 = ss / static_cast<double>(r) / (nbar * nbar);
  est.quantile = QuantileKind::StandardNormal;
  est.sample_count = r;
  return est;
}

double critical_value(const VarianceEstimate& est, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw Error("delta must lie in (0,1)");
  const double p = 1.0 - delta / 2.0;
  return est.quantile == QuantileKind::StudentT ? student_t_quantile(static_cast<double>(est.dof), p)
                                                : normal_quantile(p);
}

double half_width_from(const VarianceEstimate& est, double critical, std::int64_t run_length) {
  if (run_length <= 0) throw Error("run length must be positive");
  if (est.sigma2 <= 0.0) return 0.0;
  return critical * std::sqrt(est.sigma2) / std::sqrt(static_cast<double>(run_length));
}

double half_width(const VarianceEstimate& est, double delta, std::int64_t run_length) {
  if (!(delta > 0.0 && delta < 1.0)) throw Error("delta must lie in (0,1)");
  if (run_length <= 0) throw Error("run length must be positive");
  if (est.sigma2 <= 0.0) return 0.0;
  return half_width_from(est, critical_value(est, delta), run_length);
}

void TourMoments::add(const Tour& tour) {
  ++count_;
  total_length_ += tour.length;
  total_sum_ += tour.sum;
  const double n = static_cast<double>(tour.length);
  const double k = static_cast<double>(count_);
  const double dn = n - mean_n_;
  const double ds = tour.sum - mean_s_;
  mean_n_ += dn / k;
  mean_s_ += ds / k;
  c_nn_ += dn * (n - mean_n_);
  c_ss_ += ds * (tour.sum - mean_s_);
  c_ns_ += dn * (tour.sum - mean_s_);
}

VarianceEstimate TourMoments::estimate() const {
  if (count_ < 2) throw Error("insufficient tours");
  const double point = total_sum_ / static_cast<double>(total_length_);
  const double nbar = static_cast<double>(total_length_) / static_cast<double>(count_);
  // sum (S - g N)^2 = C_SS - 2 g C_NS + g^2 C_NN since Sbar - g Nbar = 0.
  double ss = c_ss_ - 2.0 * point * c_ns_ + point * point * c_nn_;
  if (ss < 0.0) ss = 0.0;

  VarianceEstimate est;
  est.point = point;
  est.sigma2 = ss / static_cast<double>(count_) / (nbar * nbar);
  est.quantile = QuantileKind::StandardNormal;
  est.sample_count = count_;
  return est;
}

}  // namespace fwmc
