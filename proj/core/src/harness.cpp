#include "fwmc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "fwmc/diagnostics.hpp"
#include "fwmc/error.hpp"
#include "fwmc/samplers.hpp"

namespace fwmc {

namespace {

// Stream tags for study-level randomness, disjoint from replication indices
// in practice (replication counts never approach 2^63).
constexpr std::uint64_t kPilotStream = 0x8000'0000'0000'0001ull;
constexpr std::uint64_t kTruthStream = 0x8000'0000'0000'0002ull;

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

double parse_real(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  if (const auto slash = t.find('/'); slash != std::string::npos) {
    const double num = parse_real(t.substr(0, slash), what);
    const double den = parse_real(t.substr(slash + 1), what);
    if (den == 0.0) throw Error("zero denominator in " + what);
    return num / den;
  }
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) {
    throw Error("bad number for " + what + ": '" + text + "'");
  }
  return v;
}

template <class Int>
Int parse_integer(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  Int v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw Error("bad integer for " + what + ": '" + text + "'");
  }
  return v;
}

std::string fmt_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

// Argument inside "name(...)" or the text after the name; empty when absent.
std::string method_argument(const std::string& token, const std::string& name) {
  std::string rest = token.substr(name.size());
  if (rest.empty()) return {};
  if (rest.front() == '(') {
    if (rest.back() != ')') throw Error("unbalanced parentheses in method '" + token + "'");
    return trim(rest.substr(1, rest.size() - 2));
  }
  return rest;
}

bool starts_with(const std::string& s, const std::string& prefix) {
  return s.compare(0, prefix.size(), prefix) == 0;
}

}  // namespace

std::string label(const StudyMethod& method) {
  if (const auto* gd = std::get_if<GewekeMethod>(&method)) {
    return "gd(" + fmt_short(gd->p_threshold) + ")";
  }
  return std::visit(
      [](const auto& m) -> std::string {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, GewekeMethod>) {
          return {};
        } else {
          return label(Estimator{m});
        }
      },
      method);
}

StudyMethod parse_method(const std::string& raw) {
  const std::string token = lower(trim(raw));
  if (token == "rs") return Regenerative{};
  if (starts_with(token, "cbm")) {
    const std::string arg = method_argument(token, "cbm");
    const double theta = arg.empty() ? 0.5 : parse_real(arg, "cbm theta");
    if (!(theta > 0.0 && theta < 1.0)) throw Error("cbm theta must lie in (0,1)");
    return ConsistentBatchMeans{theta};
  }
  if (starts_with(token, "bm")) {
    const std::string arg = method_argument(token, "bm");
    const auto a = arg.empty() ? std::int64_t{30} : parse_integer<std::int64_t>(arg, "bm batches");
    if (a < 2) throw Error("bm needs at least 2 batches");
    return FixedBatchMeans{a};
  }
  if (starts_with(token, "gd")) {
    const std::string arg = method_argument(token, "gd");
    const double p = arg.empty() ? 0.05 : parse_real(arg, "gd threshold");
    if (!(p >= 0.0 && p < 1.0)) throw Error("gd threshold must lie in [0,1)");
    return GewekeMethod{p};
  }
  throw Error("unknown method '" + raw + "'");
}

namespace {

std::string example_name(Example e) {
  switch (e) {
    case Example::Pareto: return "pareto";
    case Example::Hier: return "hier";
    case Example::TwoState: return "twostate";
  }
  return "unknown";
}

}  // namespace

void StudyConfig::validate() const {
  if (methods.empty()) throw Error("methods must not be empty");
  if (reps < 1) throw Error("reps must be at least 1");
  StoppingConfig{epsilon, delta, n_star}.validate();
  if (r_star < 1) throw Error("r_star must be at least 1");
  if (cap < std::max(n_star, r_star)) throw Error("cap must be at least n_star and r_star");
  if (checkpoint < 1) throw Error("checkpoint must be positive");
  if (gd_interval < 1) throw Error("gd_interval must be positive");
  GewekeConfig{gd_frac_a, gd_frac_b, gd_min_n, 0.05}.validate();
  std::set<std::string> seen;
  for (const auto& m : methods) {
    if (!seen.insert(label(m)).second) throw Error("duplicate method " + label(m));
  }
  switch (example) {
    case Example::Pareto:
      ParetoIndepMH{pareto_alpha, pareto_beta, pareto_lambda, pareto_c}.validate();
      break;
    case Example::TwoState:
      TwoStateChain{twostate_p, twostate_q}.validate();
      break;
    case Example::Hier:
      if (data_path.empty()) throw Error("hier example needs data_path");
      if (!(hier_a > 0.0 && hier_b > 0.0 && hier_c > 0.0)) throw Error("hier constants must be positive");
      if (hier_coordinate < 1) throw Error("hier_coordinate is 1-based");
      if (pilot_sweeps < 2) throw Error("pilot_sweeps must be at least 2");
      if (truth_draws < 2) throw Error("truth_draws must be at least 2");
      break;
  }
}

std::vector<std::pair<std::string, std::string>> StudyConfig::entries() const {
  std::string method_list;
  for (std::size_t i = 0; i < methods.size(); ++i) {
    if (i > 0) method_list += ",";
    method_list += label(methods[i]);
  }
  std::vector<std::pair<std::string, std::string>> e = {
      {"example", example_name(example)},
      {"methods", method_list},
      {"epsilon", fmt_real(epsilon)},
      {"delta", fmt_real(delta)},
      {"n_star", std::to_string(n_star)},
      {"r_star", std::to_string(r_star)},
      {"reps", std::to_string(reps)},
      {"base_seed", std::to_string(base_seed)},
      {"truth", truth},
      {"cap", std::to_string(cap)},
      {"checkpoint", std::to_string(checkpoint)},
      {"gd_interval", std::to_string(gd_interval)},
      {"gd_min_n", std::to_string(gd_min_n)},
      {"gd_frac_a", fmt_real(gd_frac_a)},
      {"gd_frac_b", fmt_real(gd_frac_b)},
  };
  switch (example) {
    case Example::Pareto:
      e.insert(e.end(), {{"pareto_alpha", fmt_real(pareto_alpha)},
                         {"pareto_beta", fmt_real(pareto_beta)},
                         {"pareto_lambda", fmt_real(pareto_lambda)},
                         {"pareto_c", fmt_real(pareto_c)}});
      break;
    case Example::TwoState:
      e.insert(e.end(), {{"twostate_p", fmt_real(twostate_p)}, {"twostate_q", fmt_real(twostate_q)}});
      break;
    case Example::Hier:
      e.insert(e.end(), {{"data_path", data_path.string()},
                         {"hier_a", fmt_real(hier_a)},
                         {"hier_b", fmt_real(hier_b)},
                         {"hier_c", fmt_real(hier_c)},
                         {"hier_coordinate", std::to_string(hier_coordinate)},
                         {"pilot_sweeps", std::to_string(pilot_sweeps)},
                         {"truth_draws", std::to_string(truth_draws)}});
      break;
  }
  return e;
}

StudyConfig parse_study_config(const std::string& text, const std::filesystem::path& base_dir) {
  StudyConfig cfg;
  using Setter = std::function<void(StudyConfig&, const std::string&)>;
  const auto real = [](double StudyConfig::*field, const char* name) -> Setter {
    return [field, name](StudyConfig& c, const std::string& v) { c.*field = parse_real(v, name); };
  };
  const auto integer = [](std::int64_t StudyConfig::*field, const char* name) -> Setter {
    return [field, name](StudyConfig& c, const std::string& v) {
      c.*field = parse_integer<std::int64_t>(v, name);
    };
  };
  const std::map<std::string, Setter> setters = {
      {"example",
       [](StudyConfig& c, const std::string& v) {
         const std::string e = lower(v);
         if (e == "pareto") c.example = Example::Pareto;
         else if (e == "hier") c.example = Example::Hier;
         else if (e == "twostate") c.example = Example::TwoState;
         else throw Error("unknown example '" + v + "'");
       }},
      {"methods",
       [](StudyConfig& c, const std::string& v) {
         c.methods.clear();
         std::string token;
         int depth = 0;
         for (char ch : v + ",") {
           if (ch == '(') ++depth;
           if (ch == ')') --depth;
           if (ch == ',' && depth == 0) {
             if (!trim(token).empty()) c.methods.push_back(parse_method(token));
             token.clear();
           } else {
             token += ch;
           }
         }
       }},
      {"epsilon", real(&StudyConfig::epsilon, "epsilon")},
      {"delta", real(&StudyConfig::delta, "delta")},
      {"n_star", integer(&StudyConfig::n_star, "n_star")},
      {"r_star", integer(&StudyConfig::r_star, "r_star")},
      {"reps", integer(&StudyConfig::reps, "reps")},
      {"base_seed",
       [](StudyConfig& c, const std::string& v) {
         c.base_seed = parse_integer<std::uint64_t>(v, "base_seed");
       }},
      {"truth", [](StudyConfig& c, const std::string& v) { c.truth = v; }},
      {"data_path", [](StudyConfig& c, const std::string& v) { c.data_path = v; }},
      {"output_dir", [](StudyConfig& c, const std::string& v) { c.output_dir = v; }},
      {"cap", integer(&StudyConfig::cap, "cap")},
      {"checkpoint", integer(&StudyConfig::checkpoint, "checkpoint")},
      {"gd_interval", integer(&StudyConfig::gd_interval, "gd_interval")},
      {"gd_min_n", integer(&StudyConfig::gd_min_n, "gd_min_n")},
      {"gd_frac_a", real(&StudyConfig::gd_frac_a, "gd_frac_a")},
      {"gd_frac_b", real(&StudyConfig::gd_frac_b, "gd_frac_b")},
      {"pareto_alpha", real(&StudyConfig::pareto_alpha, "pareto_alpha")},
      {"pareto_beta", real(&StudyConfig::pareto_beta, "pareto_beta")},
      {"pareto_lambda", real(&StudyConfig::pareto_lambda, "pareto_lambda")},
      {"pareto_c", real(&StudyConfig::pareto_c, "pareto_c")},
      {"twostate_p", real(&StudyConfig::twostate_p, "twostate_p")},
      {"twostate_q", real(&StudyConfig::twostate_q, "twostate_q")},
      {"hier_a", real(&StudyConfig::hier_a, "hier_a")},
      {"hier_b", real(&StudyConfig::hier_b, "hier_b")},
      {"hier_c", real(&StudyConfig::hier_c, "hier_c")},
      {"hier_coordinate", integer(&StudyConfig::hier_coordinate, "hier_coordinate")},
      {"pilot_sweeps", integer(&StudyConfig::pilot_sweeps, "pilot_sweeps")},
      {"truth_draws", integer(&StudyConfig::truth_draws, "truth_draws")},
  };

  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error("line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = lower(trim(line.substr(0, eq)));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) throw Error("unknown config key '" + key + "'");
    it->second(cfg, value);
  }

  if (!cfg.data_path.empty() && cfg.data_path.is_relative() && !base_dir.empty()) {
    cfg.data_path = (base_dir / cfg.data_path).lexically_normal();
  }
  cfg.validate();
  return cfg;
}

StudyConfig load_study_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_study_config(ss.str(), path.parent_path());
}

namespace {

// Study-wide state shared read-only by all replications.
struct StudyContext {
  std::optional<HierModel> model;
  std::optional<GibbsRegenSpec> regen;
  double truth = 0.0;
  std::optional<double> truth_se;
};

double resolve_fixed_truth(const std::string& truth) {
  std::filesystem::path p(truth);
  if (std::filesystem::exists(p)) {
    std::ifstream in(p);
    std::string first;
    in >> first;
    return parse_real(first, "truth file");
  }
  return parse_real(truth, "truth");
}

StudyContext prepare(const StudyConfig& cfg) {
  StudyContext ctx;
  const std::string truth = lower(cfg.truth);
  const bool default_truth = truth == "default" || truth == "analytic" || truth == "iid";
  switch (cfg.example) {
    case Example::Pareto:
      if (truth == "iid") throw Error("truth = iid applies to the hier example");
      ctx.truth = default_truth ? ParetoIndepMH{cfg.pareto_alpha, cfg.pareto_beta, cfg.pareto_lambda,
                                                cfg.pareto_c}.target_mean()
                                : resolve_fixed_truth(cfg.truth);
      break;
    case Example::TwoState:
      if (truth == "iid") throw Error("truth = iid applies to the hier example");
      ctx.truth = default_truth ? TwoStateChain{cfg.twostate_p, cfg.twostate_q}.stationary_one()
                                : resolve_fixed_truth(cfg.truth);
      break;
    case Example::Hier: {
      if (truth == "analytic") throw Error("no analytic truth for the hier example");
      ctx.model.emplace(read_data_csv(cfg.data_path), cfg.hier_a, cfg.hier_b, cfg.hier_c);
      if (static_cast<std::size_t>(cfg.hier_coordinate) > ctx.model->size()) {
        throw Error("hier_coordinate exceeds data length");
      }
      const auto coord = static_cast<std::size_t>(cfg.hier_coordinate - 1);

      Rng pilot_rng(derive_seed(cfg.base_seed, kPilotStream));
      GibbsState state = iid_posterior_draw(*ctx.model, pilot_rng);
      std::vector<GibbsState> pilot;
      pilot.reserve(static_cast<std::size_t>(cfg.pilot_sweeps));
      for (std::int64_t i = 0; i < cfg.pilot_sweeps; ++i) {
        gibbs_sweep(*ctx.model, state, pilot_rng);
        pilot.push_back(state);
      }
      ctx.regen = gibbs_regen_from_pilot(*ctx.model, pilot);

      if (default_truth) {
        Rng truth_rng(derive_seed(cfg.base_seed, kTruthStream));
        double mean = 0.0;
        double m2 = 0.0;
        for (std::int64_t i = 0; i < cfg.truth_draws; ++i) {
          const double v = iid_posterior_draw(*ctx.model, truth_rng).theta[coord];
          const double d = v - mean;
          mean += d / static_cast<double>(i + 1);
          m2 += d * (v - mean);
        }
        ctx.truth = mean;
        const auto n = static_cast<double>(cfg.truth_draws);
        ctx.truth_se = std::sqrt(m2 / (n - 1.0) / n);
      } else {
        ctx.truth = resolve_fixed_truth(cfg.truth);
      }
      break;
    }
  }
  return ctx;
}

std::unique_ptr<SplitChain> make_chain(const StudyConfig& cfg, const StudyContext& ctx,
                                       std::uint64_t seed) {
  switch (cfg.example) {
    case Example::Pareto:
      return std::make_unique<ParetoSplitChain>(
          ParetoIndepMH{cfg.pareto_alpha, cfg.pareto_beta, cfg.pareto_lambda, cfg.pareto_c}, seed);
    case Example::TwoState:
      return std::make_unique<TwoStateSplitChain>(TwoStateChain{cfg.twostate_p, cfg.twostate_q}, seed);
    case Example::Hier:
      return std::make_unique<GibbsSplitChain>(*ctx.model, *ctx.regen,
                                               static_cast<std::size_t>(cfg.hier_coordinate - 1), seed);
  }
  throw Error("unknown example");
}

using Monitor = std::variant<BatchMeansMonitor, RegenerativeMonitor, GewekeMonitor>;

Monitor make_monitor(const StudyConfig& cfg, const StudyMethod& method) {
  if (std::holds_alternative<Regenerative>(method)) {
    return RegenerativeMonitor(StoppingConfig{cfg.epsilon, cfg.delta, cfg.r_star});
  }
  if (const auto* gd = std::get_if<GewekeMethod>(&method)) {
    return GewekeMonitor(GewekeConfig{cfg.gd_frac_a, cfg.gd_frac_b, cfg.gd_min_n, gd->p_threshold},
                         cfg.gd_interval);
  }
  const BatchEstimator est = std::holds_alternative<FixedBatchMeans>(method)
                                 ? BatchEstimator{std::get<FixedBatchMeans>(method)}
                                 : BatchEstimator{std::get<ConsistentBatchMeans>(method)};
  return BatchMeansMonitor(est, StoppingConfig{cfg.epsilon, cfg.delta, cfg.n_star},
                           CheckpointPolicy::every(cfg.checkpoint));
}

ReplicationRow row_from_report(const FixedWidthReport& r, double truth) {
  ReplicationRow row;
  row.n_final = r.iterations;
  row.r_final = r.tours;
  if (r.converged()) {
    row.estimate = r.estimate;
    row.half_width = r.half_width;
    row.covered = std::abs(r.estimate - truth) <= r.half_width ? 1 : 0;
  }
  return row;
}

std::vector<ReplicationRow> run_replication(const StudyConfig& cfg, const StudyContext& ctx,
                                            std::int64_t rep) {
  const std::uint64_t seed = derive_seed(cfg.base_seed, static_cast<std::uint64_t>(rep));
  const std::size_t m = cfg.methods.size();
  std::vector<ReplicationRow> rows(m);
  for (std::size_t i = 0; i < m; ++i) {
    rows[i].rep = rep;
    rows[i].method = label(cfg.methods[i]);
    rows[i].seed = seed;
  }

  try {
    std::unique_ptr<SplitChain> chain = make_chain(cfg, ctx, seed);
    std::vector<Monitor> monitors;
    monitors.reserve(m);
    for (const auto& method : cfg.methods) monitors.push_back(make_monitor(cfg, method));
    std::vector<bool> done(m, false);
    std::size_t remaining = m;

    const auto finish = [&](std::size_t i, ReplicationRow row) {
      row.rep = rep;
      row.method = rows[i].method;
      row.seed = seed;
      rows[i] = std::move(row);
      done[i] = true;
      --remaining;
    };

    std::int64_t iter = 0;
    while (remaining > 0 && iter < cfg.cap) {
      const double x = chain->value();
      const bool regen = chain->advance();
      ++iter;
      for (std::size_t i = 0; i < m; ++i) {
        if (done[i]) continue;
        std::visit(
            [&](auto& mon) {
              using T = std::decay_t<decltype(mon)>;
              if constexpr (std::is_same_v<T, BatchMeansMonitor>) {
                if (auto r = mon.observe(x)) finish(i, row_from_report(*r, ctx.truth));
              } else if constexpr (std::is_same_v<T, RegenerativeMonitor>) {
                if (auto r = mon.observe(x, regen)) finish(i, row_from_report(*r, ctx.truth));
              } else {
                if (auto s = mon.observe(x)) {
                  ReplicationRow row;
                  row.n_final = s->n;
                  row.estimate = s->estimate;
                  finish(i, row);
                }
              }
            },
            monitors[i]);
      }
    }
    // Capped methods: record how far they got, without an estimate.
    for (std::size_t i = 0; i < m; ++i) {
      if (done[i]) continue;
      rows[i].n_final = iter;
      if (const auto* rs = std::get_if<RegenerativeMonitor>(&monitors[i])) rows[i].r_final = rs->tours();
    }
  } catch (const Error&) {
    for (auto& row : rows) {
      row.n_final.reset();
      row.r_final.reset();
      row.estimate.reset();
      row.half_width.reset();
      row.covered.reset();
    }
  }
  return rows;
}

}  // namespace

StudyResult run_study(const StudyConfig& cfg, int workers) {
  cfg.validate();
  const StudyContext ctx = prepare(cfg);

  std::vector<std::vector<ReplicationRow>> per_rep(static_cast<std::size_t>(cfg.reps));
  std::atomic<std::int64_t> next{0};
  const auto work = [&] {
    for (std::int64_t rep = next++; rep < cfg.reps; rep = next++) {
      per_rep[static_cast<std::size_t>(rep)] = run_replication(cfg, ctx, rep);
    }
  };
  const int n_threads = std::max(1, std::min<int>(workers, static_cast<int>(cfg.reps)));
  if (n_threads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  StudyResult result;
  result.truth = ctx.truth;
  for (auto& rows : per_rep) {
    for (auto& r : rows) result.rows.push_back(std::move(r));
  }
  result.manifest["version"] = kVersion;
  for (const auto& [k, v] : cfg.entries()) result.manifest[k] = v;
  result.manifest["truth_value"] = fmt_real(ctx.truth);
  if (ctx.truth_se) result.manifest["truth_se"] = fmt_real(*ctx.truth_se);
  if (ctx.regen) {
    result.manifest["regen_d1"] = fmt_real(ctx.regen->d1);
    result.manifest["regen_d2"] = fmt_real(ctx.regen->d2);
    result.manifest["regen_d3"] = fmt_real(ctx.regen->d3);
    result.manifest["regen_d4"] = fmt_real(ctx.regen->d4);
  }
  return result;
}

namespace {

struct Moments {
  std::int64_t n = 0;
  double sum = 0.0;
  std::vector<double> values;

  void add(double v) {
    ++n;
    sum += v;
    values.push_back(v);
  }
  std::optional<double> mean() const {
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
  }
  std::optional<double> se() const {
    if (n < 2) return std::nullopt;
    const double m = sum / static_cast<double>(n);
    double ss = 0.0;
    for (double v : values) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(n - 1)) / std::sqrt(static_cast<double>(n));
  }
};

}  // namespace

std::vector<SummaryRow> summarize(const std::vector<ReplicationRow>& rows, double truth) {
  std::vector<std::string> order;
  struct Acc {
    std::int64_t reps = 0;
    std::int64_t failed = 0;
    Moments n, r, hw, cov, sq;
  };
  std::map<std::string, Acc> acc;
  for (const auto& row : rows) {
    if (!acc.count(row.method)) order.push_back(row.method);
    Acc& a = acc[row.method];
    ++a.reps;
    if (row.failed()) {
      ++a.failed;
      continue;
    }
    if (row.n_final) a.n.add(static_cast<double>(*row.n_final));
    if (row.r_final) a.r.add(static_cast<double>(*row.r_final));
    if (row.half_width) a.hw.add(*row.half_width);
    if (row.covered) a.cov.add(static_cast<double>(*row.covered));
    const double err = *row.estimate - truth;
    a.sq.add(err * err);
  }

  std::vector<SummaryRow> out;
  for (const auto& method : order) {
    const Acc& a = acc[method];
    SummaryRow s;
    s.method = method;
    s.reps = a.reps;
    s.failed = a.failed;
    s.mean_n = a.n.mean();
    s.se_n = a.n.se();
    s.mean_r = a.r.mean();
    s.se_r = a.r.se();
    s.mean_half_width = a.hw.mean();
    s.se_half_width = a.hw.se();
    s.coverage = a.cov.mean();
    if (s.coverage && a.cov.n >= 2) {
      const double p = *s.coverage;
      s.se_coverage = std::sqrt(p * (1.0 - p) / static_cast<double>(a.cov.n));
    }
    s.mse = a.sq.mean();
    s.se_mse = a.sq.se();
    out.push_back(std::move(s));
  }
  return out;
}

namespace {

template <class T>
std::string opt_field(const std::optional<T>& v) {
  if (!v) return "NA";
  if constexpr (std::is_floating_point_v<T>) {
    return fmt_real(*v);
  } else {
    return std::to_string(*v);
  }
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

template <class T>
std::optional<T> parse_opt(const std::string& field, const char* what) {
  if (field == "NA") return std::nullopt;
  if constexpr (std::is_floating_point_v<T>) {
    return parse_real(field, what);
  } else {
    return parse_integer<T>(field, what);
  }
}

}  // namespace

void write_rows_csv(std::ostream& out, const std::vector<ReplicationRow>& rows) {
  out << kRowsHeader << '\n';
  for (const auto& r : rows) {
    out << r.rep << ',' << r.method << ',' << opt_field(r.n_final) << ',' << opt_field(r.r_final)
        << ',' << opt_field(r.estimate) << ',' << opt_field(r.half_width) << ','
        << opt_field(r.covered) << ',' << r.seed << '\n';
  }
}

std::vector<ReplicationRow> read_rows_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) return {};
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kRowsHeader) throw Error("unexpected rows.csv header");
  std::vector<ReplicationRow> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 8) throw Error("rows.csv: expected 8 fields, got " + std::to_string(f.size()));
    ReplicationRow r;
    r.rep = parse_integer<std::int64_t>(f[0], "rep");
    r.method = f[1];
    r.n_final = parse_opt<std::int64_t>(f[2], "n_final");
    r.r_final = parse_opt<std::int64_t>(f[3], "r_final");
    r.estimate = parse_opt<double>(f[4], "estimate");
    r.half_width = parse_opt<double>(f[5], "half_width");
    r.covered = parse_opt<int>(f[6], "covered");
    r.seed = parse_integer<std::uint64_t>(f[7], "seed");
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& summary) {
  out << "method,reps,failed,mean_n,se_n,mean_r,se_r,mean_half_width,se_half_width,"
         "coverage,se_coverage,mse,se_mse\n";
  for (const auto& s : summary) {
    out << s.method << ',' << s.reps << ',' << s.failed << ',' << opt_field(s.mean_n) << ','
        << opt_field(s.se_n) << ',' << opt_field(s.mean_r) << ',' << opt_field(s.se_r) << ','
        << opt_field(s.mean_half_width) << ',' << opt_field(s.se_half_width) << ','
        << opt_field(s.coverage) << ',' << opt_field(s.se_coverage) << ',' << opt_field(s.mse)
        << ',' << opt_field(s.se_mse) << '\n';
  }
}

std::string format_summary_table(const std::vector<SummaryRow>& summary) {
  const auto cell = [](const std::optional<double>& v, const std::optional<double>& se,
                       const char* fmt) {
    if (!v) return std::string("NA");
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, *v);
    std::string s = buf;
    s += " (";
    if (se) {
      std::snprintf(buf, sizeof buf, "%.2g", *se);
      s += buf;
    } else {
      s += "NA";
    }
    return s + ")";
  };
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-14s %6s %6s  %-22s %-18s %-16s %-22s\n", "method", "reps",
                "failed", "avg half-width", "avg chain length", "coverage", "MSE");
  out << line;
  for (const auto& s : summary) {
    std::snprintf(line, sizeof line, "%-14s %6lld %6lld  %-22s %-18s %-16s %-22s\n", s.method.c_str(),
                  static_cast<long long>(s.reps), static_cast<long long>(s.failed),
                  cell(s.mean_half_width, s.se_half_width, "%.4g").c_str(),
                  cell(s.mean_n, s.se_n, "%.1f").c_str(), cell(s.coverage, s.se_coverage, "%.3f").c_str(),
                  cell(s.mse, s.se_mse, "%.3g").c_str());
    out << line;
  }
  return out.str();
}

void write_study(const std::filesystem::path& dir, const StudyResult& result) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "manifest.txt", std::ios::binary);
    for (const auto& [k, v] : result.manifest) out << k << '=' << v << '\n';
  }
  {
    std::ofstream out(dir / "rows.csv", std::ios::binary);
    write_rows_csv(out, result.rows);
  }
  {
    std::ofstream out(dir / "summary.csv", std::ios::binary);
    write_summary_csv(out, summarize(result.rows, result.truth));
  }
}

std::vector<SummaryRow> summarize_dir(const std::filesystem::path& dir) {
  const auto rows_path = dir / "rows.csv";
  const auto manifest_path = dir / "manifest.txt";
  if (!std::filesystem::exists(rows_path) || !std::filesystem::exists(manifest_path)) {
    throw Error("no results");
  }
  std::ifstream manifest(manifest_path);
  std::optional<double> truth;
  std::string line;
  while (std::getline(manifest, line)) {
    const auto eq = line.find('=');
    if (eq != std::string::npos && line.substr(0, eq) == "truth_value") {
      truth = parse_real(line.substr(eq + 1), "truth_value");
    }
  }
  if (!truth) throw Error("manifest lacks truth_value");
  std::ifstream in(rows_path);
  const auto rows = read_rows_csv(in);
  if (rows.empty()) throw Error("no results");
  return summarize(rows, *truth);
}

}  // namespace fwmc
