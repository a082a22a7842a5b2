#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fwmc/stopping.hpp"

namespace fwmc {

inline constexpr const char* kVersion = "0.1.0";

struct GewekeMethod {
  double p_threshold = 0.05;
};

// A stopping method evaluated in a study.
using StudyMethod = std::variant<FixedBatchMeans, ConsistentBatchMeans, Regenerative, GewekeMethod>;

std::string label(const StudyMethod& method);

// Accepts "bm30", "bm(30)", "cbm", "cbm(0.5)", "cbm(1/3)", "rs", "gd", "gd(0.05)".
StudyMethod parse_method(const std::string& token);

enum class Example { Pareto, Hier, TwoState };

struct StudyConfig {
  Example example = Example::Pareto;
  std::vector<StudyMethod> methods;
  double epsilon = 0.005;
  double delta = 0.05;
  std::int64_t n_star = 45;
  std::int64_t r_star = 30;
  std::int64_t reps = 100;
  std::uint64_t base_seed = 1;
  // "analytic", "iid", a number, or a path to a file holding one number.
  std::string truth = "default";
  std::filesystem::path data_path;
  std::filesystem::path output_dir = "results";
  std::int64_t cap = 10'000'000;
  std::int64_t checkpoint = 100;

  std::int64_t gd_interval = 1;
  std::int64_t gd_min_n = 120;
  double gd_frac_a = 0.1;
  double gd_frac_b = 0.5;

  double pareto_alpha = 1.0;
  double pareto_beta = 10.0;
  double pareto_lambda = 9.0;
  double pareto_c = 1.5;

  double twostate_p = 0.5;
  double twostate_q = 0.5;

  double hier_a = 1.0;
  double hier_b = 2.0;
  double hier_c = 2.0;
  std::int64_t hier_coordinate = 9;  // 1-based index of the reported theta
  std::int64_t pilot_sweeps = 1000;
  std::int64_t truth_draws = 1'000'000;

  void validate() const;
  // Canonical key = value lines (what the manifest echoes).
  std::vector<std::pair<std::string, std::string>> entries() const;
};

// Parses "key = value" lines; '#' starts a comment. Unknown keys are
// rejected. Relative data paths resolve against base_dir.
StudyConfig parse_study_config(const std::string& text,
                               const std::filesystem::path& base_dir = {});
StudyConfig load_study_config(const std::filesystem::path& path);

// One method's outcome in one replication. Empty optionals print as NA:
// a failed or capped replication has no estimate; GD has no interval; only
// RS has a tour count.
struct ReplicationRow {
  std::int64_t rep = 0;
  std::string method;
  std::optional<std::int64_t> n_final;
  std::optional<std::int64_t> r_final;
  std::optional<double> estimate;
  std::optional<double> half_width;
  std::optional<int> covered;
  std::uint64_t seed = 0;

  bool failed() const { return !estimate.has_value(); }
};

struct StudyResult {
  std::vector<ReplicationRow> rows;  // ordered by rep, then method
  double truth = 0.0;
  std::map<std::string, std::string> manifest;
};

StudyResult run_study(const StudyConfig& cfg, int workers = 1);

struct SummaryRow {
  std::string method;
  std::int64_t reps = 0;
  std::int64_t failed = 0;
  std::optional<double> mean_n, se_n;
  std::optional<double> mean_r, se_r;
  std::optional<double> mean_half_width, se_half_width;
  std::optional<double> coverage, se_coverage;
  std::optional<double> mse, se_mse;
};

// Per-method means with standard errors (sample sd / sqrt(reps); the
// coverage SE is sqrt(p(1-p)/reps)). Failed rows are counted, not averaged.
std::vector<SummaryRow> summarize(const std::vector<ReplicationRow>& rows, double truth);

inline constexpr const char* kRowsHeader = "rep,method,n_final,r_final,estimate,half_width,covered,seed";

void write_rows_csv(std::ostream& out, const std::vector<ReplicationRow>& rows);
std::vector<ReplicationRow> read_rows_csv(std::istream& in);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& summary);
std::string format_summary_table(const std::vector<SummaryRow>& summary);

// Writes manifest.txt, rows.csv and summary.csv into dir.
void write_study(const std::filesystem::path& dir, const StudyResult& result);

// Re-aggregates a results directory; throws "no results" if it holds none.
std::vector<SummaryRow> summarize_dir(const std::filesystem::path& dir);

}  // namespace fwmc
