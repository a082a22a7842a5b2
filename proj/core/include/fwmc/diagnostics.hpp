#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fwmc/chain_model.hpp"
#include "fwmc/stopping.hpp"

namespace fwmc {

// Early window A = first frac_a of the run, late window B = last frac_b.
struct GewekeConfig {
  double frac_a = 0.1;
  double frac_b = 0.5;
  std::int64_t min_n = 120;
  double p_threshold = 0.05;

  void validate() const;
};

struct GewekeResult {
  double z = 0.0;
  double p_value = 1.0;
};

// z = (mean_A - mean_B) / sqrt(s2_A/n_A + s2_B/n_B) with each s2 a CBM
// (theta = 1/2) estimate inside its window; p = 2(1 - Phi(|z|)).
GewekeResult geweke_z(std::span<const double> values, const GewekeConfig& cfg);
GewekeResult geweke_z(const ScalarTrace& trace, const GewekeConfig& cfg);

struct GewekeStop {
  std::int64_t n = 0;
  double estimate = 0.0;  // ergodic mean of the whole run
  double p_value = 0.0;
  bool converged = true;
};

// Stops at the first checkpoint >= min_n whose p-value exceeds the threshold.
class GewekeMonitor {
public:
  GewekeMonitor(GewekeConfig cfg, std::int64_t interval = 1);

  std::optional<GewekeStop> observe(double x);
  bool stopped() const { return stopped_; }
  std::int64_t count() const { return static_cast<std::int64_t>(values_.size()); }
  GewekeStop snapshot() const;

private:
  GewekeConfig cfg_;
  std::int64_t interval_;
  std::vector<double> values_;
  double sum_ = 0.0;
  double last_p_ = 0.0;
  bool stopped_ = false;
};

GewekeStop gd_stopping(const ScalarSource& source, const GewekeConfig& cfg,
                       std::int64_t interval = 1, std::int64_t cap = 10'000'000);

}  // namespace fwmc
