// fwmc: fixed-width stopping for MCMC output from the command line.
//
//   fwmc study run --config study.cfg [--workers N] [--out DIR]
//   fwmc study summarize --in DIR
//   fwmc sample --example pareto --n N --seed S
//   fwmc estimate --method cbm --theta 0.5 --in trace.csv
//   fwmc quantile --t --df D --p P
//   fwmc gen-data --seed S --out data.csv

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "fwmc/chain_model.hpp"
#include "fwmc/error.hpp"
#include "fwmc/harness.hpp"
#include "fwmc/quantiles.hpp"
#include "fwmc/samplers.hpp"
#include "fwmc/variance.hpp"

namespace {

void print_real(const char* key, double v) { std::printf("%s=%.17g\n", key, v); }

int run_sample(const std::string& example, std::int64_t n, std::uint64_t seed,
               const std::string& data_path) {
  std::unique_ptr<fwmc::SplitChain> chain;
  std::optional<fwmc::HierModel> model;
  if (example == "pareto") {
    chain = std::make_unique<fwmc::ParetoSplitChain>(fwmc::ParetoIndepMH{}, seed);
  } else if (example == "twostate") {
    chain = std::make_unique<fwmc::TwoStateSplitChain>(fwmc::TwoStateChain{}, seed);
  } else if (example == "hier") {
    if (data_path.empty()) throw fwmc::Error("--data is required for the hier example");
    model.emplace(fwmc::read_data_csv(data_path), 1.0, 2.0, 2.0);
    // Q is anchored on a short pilot run started from an exact posterior draw.
    fwmc::Rng pilot_rng(fwmc::derive_seed(seed, 1));
    fwmc::GibbsState state = fwmc::iid_posterior_draw(*model, pilot_rng);
    std::vector<fwmc::GibbsState> pilot;
    for (int i = 0; i < 1000; ++i) {
      fwmc::gibbs_sweep(*model, state, pilot_rng);
      pilot.push_back(state);
    }
    const std::size_t coord = std::min<std::size_t>(8, model->size() - 1);
    chain = std::make_unique<fwmc::GibbsSplitChain>(
        *model, fwmc::gibbs_regen_from_pilot(*model, pilot), coord, seed);
  } else {
    throw fwmc::Error("unknown example '" + example + "'");
  }
  for (std::int64_t i = 0; i < n; ++i) {
    std::printf("%.17g\n", chain->value());
    chain->advance();
  }
  return 0;
}

int run_estimate(const std::string& method, double theta, std::int64_t batches,
                 const std::string& in, double delta) {
  const fwmc::ScalarTrace trace(fwmc::read_data_csv(in));
  fwmc::BatchSchedule schedule;
  if (method == "cbm") {
    schedule = fwmc::cbm_schedule(trace.size(), theta);
  } else if (method == "bm") {
    schedule = fwmc::fixed_schedule(trace.size(), batches);
  } else {
    throw fwmc::Error("estimate supports --method cbm or bm");
  }
  const fwmc::VarianceEstimate est = fwmc::batch_means(trace, schedule);
  std::printf("n=%lld\n", static_cast<long long>(trace.size()));
  std::printf("batches=%lld\n", static_cast<long long>(schedule.batches));
  std::printf("batch_size=%lld\n", static_cast<long long>(schedule.batch_size));
  print_real("estimate", est.point);
  print_real("sigma2", est.sigma2);
  print_real("half_width", fwmc::half_width(est, delta, est.sample_count));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fixed-width stopping rules for MCMC output analysis"};
  app.require_subcommand(1);

  auto* study = app.add_subcommand("study", "Replication studies");
  study->require_subcommand(1);

  auto* run = study->add_subcommand("run", "Run a replication study");
  std::string config_path;
  int workers = 1;
  std::string out_dir;
  run->add_option("--config", config_path, "Study config (key = value lines)")->required();
  run->add_option("--workers", workers, "Concurrent replications")->check(CLI::PositiveNumber);
  run->add_option("--out", out_dir, "Output directory (overrides output_dir)");

  auto* summarize = study->add_subcommand("summarize", "Re-aggregate a results directory");
  std::string in_dir;
  summarize->add_option("--in", in_dir, "Results directory")->required();

  auto* sample = app.add_subcommand("sample", "Emit a raw trace, one value per line");
  std::string example = "pareto";
  std::int64_t n = 1000;
  std::uint64_t seed = 1;
  std::string data_path;
  sample->add_option("--example", example, "pareto | twostate | hier");
  sample->add_option("--n", n, "Number of iterations")->check(CLI::PositiveNumber);
  sample->add_option("--seed", seed, "Stream seed");
  sample->add_option("--data", data_path, "Data file for the hier example");

  auto* estimate = app.add_subcommand("estimate", "One-shot batch means estimate of a trace");
  std::string method = "cbm";
  double theta = 0.5;
  std::int64_t batches = 30;
  std::string trace_in;
  double delta = 0.05;
  estimate->add_option("--method", method, "cbm | bm");
  estimate->add_option("--theta", theta, "CBM batch-size exponent");
  estimate->add_option("--batches", batches, "BM batch count");
  estimate->add_option("--in", trace_in, "Trace file, one value per line")->required();
  estimate->add_option("--delta", delta, "One minus the confidence level");

  auto* quantile = app.add_subcommand("quantile", "Normal or Student t quantile");
  bool use_t = false;
  bool use_normal = false;
  double df = 1.0;
  double p = 0.975;
  quantile->add_flag("--t", use_t, "Student t quantile");
  quantile->add_flag("--normal", use_normal, "Standard normal quantile");
  quantile->add_option("--df", df, "Degrees of freedom");
  quantile->add_option("--p", p, "Probability")->required();

  auto* gen = app.add_subcommand("gen-data", "Write a synthetic hierarchical-model data set");
  std::uint64_t gen_seed = 20060101;
  std::size_t gen_k = 18;
  double gen_mu = -3.3;
  std::string gen_out;
  gen->add_option("--seed", gen_seed, "Seed");
  gen->add_option("--k", gen_k, "Number of observations");
  gen->add_option("--mu", gen_mu, "Population mean");
  gen->add_option("--out", gen_out, "Output file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      const fwmc::StudyConfig cfg = fwmc::load_study_config(config_path);
      const std::filesystem::path dir = out_dir.empty() ? cfg.output_dir : std::filesystem::path(out_dir);
      const fwmc::StudyResult result = fwmc::run_study(cfg, workers);
      fwmc::write_study(dir, result);
      std::cout << fwmc::format_summary_table(fwmc::summarize(result.rows, result.truth));
      std::cout << "results written to " << dir.string() << "\n";
      return 0;
    }
    if (summarize->parsed()) {
      std::cout << fwmc::format_summary_table(fwmc::summarize_dir(in_dir));
      return 0;
    }
    if (sample->parsed()) return run_sample(example, n, seed, data_path);
    if (estimate->parsed()) return run_estimate(method, theta, batches, trace_in, delta);
    if (quantile->parsed()) {
      if (use_t == use_normal) throw fwmc::Error("pass exactly one of --t or --normal");
      const double q = use_t ? fwmc::student_t_quantile(df, p) : fwmc::normal_quantile(p);
      std::printf("%.17g\n", q);
      return 0;
    }
    if (gen->parsed()) {
      fwmc::write_data_csv(gen_out, fwmc::synthetic_hier_data(gen_seed, gen_k, gen_mu, 1.0, 2.0, 2.0));
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
