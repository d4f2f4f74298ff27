#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "proxagg/bounds.hpp"
#include "proxagg/oracle.hpp"
#include "proxagg/rng.hpp"
#include "proxagg/solvers.hpp"

namespace proxagg {

// Configuration problems (bad JSON, unknown solver, invalid grid) map to
// exit code 1; anything thrown as std::runtime_error maps to exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct SolverSpec {
  std::string id;  // canonical name: seeds the rng stream and labels CSV rows
  std::string base;
  StepSchedule schedule = StepSchedule::WorstCase;
  std::optional<double> grad_bound_override;  // algorithm1 sensitivity runs
  bool average = true;                        // sgd: compare the averaged output
  EpochGdConfig epoch;
};

struct ExperimentConfig {
  std::optional<Problem> problem;
  std::vector<SolverSpec> solvers;
  std::vector<std::int64_t> n_grid;
  std::int64_t trials = 1;
  std::uint64_t master_seed = 0;
  std::string out;
  std::string mode = "sweep";
  int threads = 1;
};

// Aggregated Monte Carlo cell: M trials of one solver at one budget.
struct SummaryRow {
  std::string solver;
  std::int64_t n = 0;
  std::int64_t trials = 0;
  double mean_subopt = 0.0;
  double stderr_mean = 0.0;
  double q50 = 0.0, q90 = 0.0, q95 = 0.0, q99 = 0.0;
  double bound = 0.0;
  bool bound_satisfied = false;
};

namespace detail {

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Nearest-rank quantile (no interpolation): value at rank ceil(p*M).
inline double nearest_rank(const std::vector<double>& sorted, double p) {
  const std::size_t m = sorted.size();
  std::size_t rank = static_cast<std::size_t>(
      std::ceil(p * static_cast<double>(m)));
  rank = std::clamp<std::size_t>(rank, 1, m);
  return sorted[rank - 1];
}

}  // namespace detail

// Deterministic per-trial stream: counter-based hash of
// (master_seed, solver id, n, trial index), so adding solvers or budgets
// never perturbs other cells' randomness.
inline RngStream trial_stream(std::uint64_t master_seed,
                              const std::string& solver_id, std::int64_t n,
                              std::int64_t trial_index) {
  return RngStream(master_seed,
                   {detail::fnv1a(solver_id), static_cast<std::uint64_t>(n),
                    static_cast<std::uint64_t>(trial_index)});
}

// Runs one solver once and returns the suboptimality
// S = f(output) - min f, floored at 0 after checking it is not more negative
// than the certified optimum slack allows.
inline double run_trial(const ExperimentConfig& cfg, const SolverSpec& solver,
                        std::int64_t n, std::int64_t trial_index) {
  const Problem& problem = *cfg.problem;
  RngStream rng = trial_stream(cfg.master_seed, solver.id, n, trial_index);

  Vec output;
  try {
    if (solver.base == "algorithm1") {
      Algo1Config acfg;
      acfg.n = n;
      acfg.schedule = solver.schedule;
      acfg.grad_bound_override = solver.grad_bound_override;
      acfg.record_points = false;
      output = algorithm1(problem, acfg, rng).output;
    } else if (solver.base == "sgd") {
      output = sgd(problem, n, rng, solver.average).output;
    } else if (solver.base == "epoch_gd") {
      output = epoch_gd(problem, n, rng, solver.epoch).output;
    } else if (solver.base == "erm") {
      output = erm(problem, n, rng).minimizer;
    } else {
      throw ConfigError("run_trial: unknown solver '" + solver.base + "'");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw std::runtime_error("trial failed (solver=" + solver.id +
                             ", n=" + std::to_string(n) +
                             ", trial=" + std::to_string(trial_index) +
                             "): " + e.what());
  }

  const double s = problem.true_value(output) - problem.true_optimum();
  const double slack = 1e-12 + problem.optimum_certificate();
  if (s < -slack)
    throw std::runtime_error(
        "run_trial: suboptimality " + detail::fmt17(s) +
        " below the certified slack; the stored optimum is inconsistent");
  return std::max(0.0, s);
}

// Theoretical bound attached to a solver's summary row.
inline double solver_bound(const SolverSpec& solver, std::int64_t n,
                           const BoundParams& p) {
  if (solver.base == "algorithm1") return algo1_rate(n, p);
  if (solver.base == "sgd") return sgd_rate(n, p);
  if (solver.base == "epoch_gd") return epoch_gd_rate(n, p);
  if (solver.base == "erm") return erm_rate(n, p);
  throw ConfigError("solver_bound: unknown solver '" + solver.base + "'");
}

// Runs cfg.trials independent trials of one solver at one budget and
// aggregates. Trials may run concurrently (cfg.threads > 1); results land in
// a slot per trial index, so scheduling never affects the output.
inline SummaryRow monte_carlo(const ExperimentConfig& cfg,
                              const SolverSpec& solver, std::int64_t n) {
  const std::int64_t m = cfg.trials;
  if (m < 2)
    throw ConfigError("monte_carlo: need trials >= 2 for a standard error");

  std::vector<double> subopt(static_cast<std::size_t>(m), 0.0);
  const int workers = std::max(1, std::min<int>(
      cfg.threads, static_cast<int>(std::thread::hardware_concurrency())));
  if (workers == 1) {
    for (std::int64_t i = 0; i < m; ++i)
      subopt[static_cast<std::size_t>(i)] = run_trial(cfg, solver, n, i);
  } else {
    std::atomic<std::int64_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto work = [&]() {
      for (;;) {
        const std::int64_t i = next.fetch_add(1);
        if (i >= m) return;
        try {
          subopt[static_cast<std::size_t>(i)] = run_trial(cfg, solver, n, i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  double mean = 0.0;
  for (double v : subopt) mean += v;
  mean /= static_cast<double>(m);
  double var = 0.0;
  for (double v : subopt) var += (v - mean) * (v - mean);
  var /= static_cast<double>(m - 1);

  std::vector<double> sorted = subopt;
  std::sort(sorted.begin(), sorted.end());

  SummaryRow row;
  row.solver = solver.id;
  row.n = n;
  row.trials = m;
  row.mean_subopt = mean;
  row.stderr_mean = std::sqrt(var / static_cast<double>(m));
  row.q50 = detail::nearest_rank(sorted, 0.50);
  row.q90 = detail::nearest_rank(sorted, 0.90);
  row.q95 = detail::nearest_rank(sorted, 0.95);
  row.q99 = detail::nearest_rank(sorted, 0.99);
  row.bound = solver_bound(solver, n, cfg.problem->bound_params());
  row.bound_satisfied = row.mean_subopt <= row.bound;
  return row;
}

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  int used = 0;
  int excluded = 0;
};

// Least-squares line through (ln n, ln mean); slope near -1 is the O(1/n)
// signature. Rows with nonpositive means are excluded with a warning.
inline RateFit fit_rate(const std::vector<SummaryRow>& rows) {
  std::vector<double> lx, ly;
  RateFit fit;
  for (const SummaryRow& r : rows) {
    if (r.mean_subopt > 0.0) {
      lx.push_back(std::log(static_cast<double>(r.n)));
      ly.push_back(std::log(r.mean_subopt));
    } else {
      ++fit.excluded;
      std::fprintf(stderr,
                   "fit_rate: excluding row (solver=%s, n=%lld) with "
                   "nonpositive mean\n",
                   r.solver.c_str(), static_cast<long long>(r.n));
    }
  }
  if (lx.size() < 3)
    throw std::runtime_error(
        "fit_rate: need at least 3 rows with positive means");
  const double n = static_cast<double>(lx.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / n;
  fit.used = static_cast<int>(lx.size());
  return fit;
}

inline void emit_csv(const std::vector<SummaryRow>& rows, std::ostream& os) {
  std::vector<SummaryRow> sorted = rows;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const SummaryRow& a, const SummaryRow& b) {
                     return a.solver != b.solver ? a.solver < b.solver
                                                 : a.n < b.n;
                   });
  os << "solver,n,trials,mean_subopt,stderr,q50,q90,q95,q99,bound,"
        "bound_satisfied\n";
  for (const SummaryRow& r : sorted) {
    os << r.solver << ',' << r.n << ',' << r.trials << ','
       << detail::fmt17(r.mean_subopt) << ',' << detail::fmt17(r.stderr_mean)
       << ',' << detail::fmt17(r.q50) << ',' << detail::fmt17(r.q90) << ','
       << detail::fmt17(r.q95) << ',' << detail::fmt17(r.q99) << ','
       << detail::fmt17(r.bound) << ',' << (r.bound_satisfied ? 1 : 0)
       << '\n';
  }
}

inline void emit_csv(const std::vector<SummaryRow>& rows,
                     const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("emit_csv: cannot open '" + path + "'");
  emit_csv(rows, os);
  if (!os.good())
    throw std::runtime_error("emit_csv: write failed for '" + path + "'");
}

// Rate comparison table per budget: the aggregation solver against the
// competitor rates. f(x1) for the bundle column defaults to the worst-case
// initial suboptimality G^2/(2 lambda).
inline void emit_bound_table(const BoundParams& params,
                             const std::vector<std::int64_t>& n_grid,
                             std::ostream& os,
                             std::optional<double> f_x1 = {}) {
  params.validate();
  const double fx1 = f_x1.value_or(params.G * params.G / (2.0 * params.lambda));
  os << "n,algo1,epoch_gd,sgd,bundle,erm\n";
  for (std::int64_t n : n_grid) {
    if (n < 2)
      throw ConfigError("emit_bound_table: budgets must be >= 2 (sgd rate)");
    os << n << ',' << detail::fmt17(algo1_rate(n, params)) << ','
       << detail::fmt17(epoch_gd_rate(n, params)) << ','
       << detail::fmt17(sgd_rate(n, params)) << ','
       << detail::fmt17(bundle_rate(n, params, fx1)) << ','
       << detail::fmt17(erm_rate(n, params)) << '\n';
  }
}

inline void emit_bound_table(const BoundParams& params,
                             const std::vector<std::int64_t>& n_grid,
                             const std::string& path,
                             std::optional<double> f_x1 = {}) {
  std::ofstream os(path, std::ios::binary);
  if (!os)
    throw std::runtime_error("emit_bound_table: cannot open '" + path + "'");
  emit_bound_table(params, n_grid, os, f_x1);
  if (!os.good())
    throw std::runtime_error("emit_bound_table: write failed for '" + path +
                             "'");
}

// ---------------------------------------------------------------------------
// JSON configuration

namespace detail {

// Scalars broadcast to the full dimension; arrays must match it.
inline Vec vec_from_json(const nlohmann::json& j, std::size_t dim,
                         const char* what) {
  if (j.is_number()) return Vec(dim, j.get<double>());
  if (j.is_array()) {
    Vec v = j.get<Vec>();
    if (v.size() != dim)
      throw ConfigError(std::string(what) + ": expected " +
                        std::to_string(dim) + " coordinates, got " +
                        std::to_string(v.size()));
    return v;
  }
  throw ConfigError(std::string(what) + ": expected number or array");
}

inline Domain domain_from_json(const nlohmann::json& j, std::size_t dim) {
  const std::string type = j.value("type", "ball");
  if (type == "ball") {
    Ball b;
    b.center = vec_from_json(j.value("center", nlohmann::json(0.0)), dim,
                             "domain.center");
    b.radius = j.value("radius", 1.0);
    return b;
  }
  if (type == "box") {
    Box b;
    b.lower = vec_from_json(j.at("lower"), dim, "domain.lower");
    b.upper = vec_from_json(j.at("upper"), dim, "domain.upper");
    return b;
  }
  if (type == "unbounded") return Unbounded{};
  throw ConfigError("domain.type must be ball, box or unbounded, got '" +
                    type + "'");
}

}  // namespace detail

// Deterministic synthetic classification rows: unit-capped features around a
// random separator, 10% label noise.
inline std::vector<DataRow> synthetic_rows(std::size_t count, std::size_t dim,
                                           std::uint64_t seed) {
  if (count == 0) throw ConfigError("synthetic_rows: count must be >= 1");
  RngStream rng(seed, {0x726f7773ULL});
  Vec sep(dim);
  for (double& c : sep) c = next_gaussian(rng);
  const double sep_norm = norm(sep);
  if (sep_norm > 0.0)
    for (double& c : sep) c /= sep_norm;

  std::vector<DataRow> rows;
  rows.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    DataRow r;
    r.x.resize(dim);
    for (double& c : r.x) c = next_gaussian(rng);
    const double nrm = norm(r.x);
    const double scale = rng.uniform(0.25, 1.0);
    if (nrm > 0.0)
      for (double& c : r.x) c *= scale / nrm;
    const double margin = dot(sep, r.x);
    r.y = margin >= 0.0 ? 1.0 : -1.0;
    if (rng.next_double() < 0.1) r.y = -r.y;
    rows.push_back(std::move(r));
  }
  return rows;
}

inline Problem problem_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  const std::size_t dim = j.at("dim").get<std::size_t>();
  if (dim < 1) throw ConfigError("problem.dim must be >= 1");
  const double lambda = j.at("lambda").get<double>();
  const Domain dom =
      detail::domain_from_json(j.value("domain", nlohmann::json::object()),
                               dim);
  const Vec x1 =
      detail::vec_from_json(j.value("x1", nlohmann::json(0.0)), dim, "x1");
  std::optional<double> unbounded_g;
  if (j.contains("grad_bound")) unbounded_g = j["grad_bound"].get<double>();
  const int average_k = j.value("average_k", 1);
  if (average_k < 1) throw ConfigError("problem.average_k must be >= 1");

  try {
    std::optional<Problem> p;
    if (kind == "noisy_quadratic") {
      const Vec w_star = detail::vec_from_json(
          j.value("w_star", nlohmann::json(0.0)), dim, "w_star");
      p = Problem::noisy_quadratic(lambda, dom, x1, w_star,
                                   j.value("grad_noise", 0.0),
                                   j.value("value_noise", 0.0), unbounded_g);
    } else if (kind == "finite_sum_hinge" || kind == "finite_sum_logistic") {
      std::vector<DataRow> rows;
      if (j.contains("rows")) {
        for (const auto& rj : j["rows"]) {
          DataRow r;
          r.x = detail::vec_from_json(rj.at("x"), dim, "row.x");
          r.y = rj.at("y").get<double>();
          rows.push_back(std::move(r));
        }
      } else if (j.contains("synthetic_rows")) {
        const auto& sj = j["synthetic_rows"];
        rows = synthetic_rows(sj.at("count").get<std::size_t>(), dim,
                              sj.value("seed", 0ULL));
      } else {
        throw ConfigError("finite-sum problem needs rows or synthetic_rows");
      }
      p = kind == "finite_sum_hinge"
              ? Problem::finite_sum_hinge(lambda, dom, x1, std::move(rows),
                                          unbounded_g)
              : Problem::finite_sum_logistic(lambda, dom, x1, std::move(rows),
                                             unbounded_g);
    } else {
      throw ConfigError("unknown problem kind '" + kind + "'");
    }
    return average_k == 1 ? *p : p->averaged_oracle(average_k);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("problem: ") + e.what());
  }
}

inline SolverSpec solver_from_json(const nlohmann::json& j) {
  SolverSpec s;
  s.base = j.at("name").get<std::string>();
  if (s.base == "algorithm1") {
    const std::string sched = j.value("schedule", "worst_case");
    if (sched == "worst_case") {
      s.schedule = StepSchedule::WorstCase;
      s.id = "algorithm1";
    } else if (sched == "adaptive") {
      s.schedule = StepSchedule::Adaptive;
      s.id = "algorithm1_adaptive";
    } else {
      throw ConfigError("algorithm1.schedule must be worst_case or adaptive");
    }
    if (j.contains("grad_bound_override"))
      s.grad_bound_override = j["grad_bound_override"].get<double>();
  } else if (s.base == "sgd") {
    s.average = j.value("average", true);
    s.id = s.average ? "sgd_avg" : "sgd_last";
  } else if (s.base == "epoch_gd") {
    s.epoch.initial_epoch_length = j.value("T1", std::int64_t{4});
    if (j.contains("eta1")) s.epoch.initial_step = j["eta1"].get<double>();
    s.id = "epoch_gd";
  } else if (s.base == "erm") {
    s.id = "erm";
  } else {
    throw ConfigError("unknown solver name '" + s.base + "'");
  }
  return s;
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  cfg.problem = problem_from_json(j.at("problem"));
  if (!j.contains("solvers") || !j["solvers"].is_array() ||
      j["solvers"].empty())
    throw ConfigError("config needs a nonempty solvers array");
  for (const auto& sj : j["solvers"])
    cfg.solvers.push_back(solver_from_json(sj));
  cfg.n_grid = j.at("n_grid").get<std::vector<std::int64_t>>();
  if (cfg.n_grid.empty()) throw ConfigError("n_grid must be nonempty");
  for (std::size_t i = 0; i < cfg.n_grid.size(); ++i) {
    if (cfg.n_grid[i] < 1) throw ConfigError("n_grid entries must be >= 1");
    if (i > 0 && cfg.n_grid[i] <= cfg.n_grid[i - 1])
      throw ConfigError("n_grid must be strictly increasing");
  }
  cfg.trials = j.value("trials", std::int64_t{1});
  if (cfg.trials < 1) throw ConfigError("trials must be >= 1");
  cfg.master_seed = j.value("master_seed", 0ULL);
  cfg.out = j.value("out", std::string{});
  cfg.mode = j.value("mode", std::string{"sweep"});
  cfg.threads = std::max(1, j.value("threads", 1));
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config parse error in '" + path + "': " + e.what());
  }
  try {
    return config_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config error in '" + path + "': " + e.what());
  }
}

// Solver/budget compatibility checks shared by the mc and sweep modes.
inline void validate_grid(const ExperimentConfig& cfg,
                          const std::vector<std::int64_t>& budgets) {
  for (const SolverSpec& s : cfg.solvers) {
    for (std::int64_t n : budgets) {
      if (s.base == "sgd" && n < 2)
        throw ConfigError("sgd needs n >= 2 (rate undefined at n=1)");
      if (s.base == "epoch_gd" && n < s.epoch.initial_epoch_length)
        throw ConfigError("epoch_gd needs n >= T1");
    }
  }
}

inline std::vector<SummaryRow> run_sweep(
    const ExperimentConfig& cfg, const std::vector<std::int64_t>& budgets) {
  validate_grid(cfg, budgets);
  std::vector<SummaryRow> rows;
  for (const SolverSpec& s : cfg.solvers)
    for (std::int64_t n : budgets) rows.push_back(monte_carlo(cfg, s, n));
  return rows;
}

}  // namespace proxagg
