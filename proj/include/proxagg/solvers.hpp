#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "proxagg/bounds.hpp"
#include "proxagg/inner_solver.hpp"
#include "proxagg/oracle.hpp"
#include "proxagg/prox_model.hpp"
#include "proxagg/rng.hpp"
#include "proxagg/vec.hpp"

namespace proxagg {

// One step of the mixing-weight recursion: u - u^2/4, strictly decreasing
// from u_1 = 1 and bounded by 4/(n+3).
inline double u_next(double u) {
  if (!(u > 0.0 && u <= 1.0))
    throw std::invalid_argument("u_next: u outside (0,1]");
  return u - 0.25 * u * u;
}

enum class StepSchedule {
  WorstCase,  // step_i = u_{i-1}/2 with the exact u-recursion
  Adaptive    // step_i = clamp(lambda * Uhat_{i-1} / G^2, 0, 1), falling back
              // to the worst-case step when the noisy Uhat estimate is <= 0
};

struct Algo1Config {
  std::int64_t n = 1;  // oracle budget
  StepSchedule schedule = StepSchedule::WorstCase;
  // G used by the Adaptive step; defaults to the problem certificate. May be
  // set below the certificate for stress tests; the trace records a warning.
  std::optional<double> grad_bound_override;
  // Keep the per-iteration x_i/y_i history. Scalar columns are always kept;
  // point storage defaults off beyond n = 100000 to bound memory at O(n+d).
  std::optional<bool> record_points;
};

// Per-iteration record of the aggregation solver. Scalar columns have one
// entry per iteration i = 1..n:
//   u[i-1]    — u_i (u_1 = 1, then the exact recursion)
//   step[i-1] — the applied mixing weight (step_1 = 1: y_1 = x_1)
//   fhat[i-1] — running sum(alpha_j f~_j(x_j)) under the current weights
//   uhat[i-1] — Uhat_i = fhat_i - min P~_i
struct Trace {
  std::vector<double> u;
  std::vector<double> step;
  std::vector<double> fhat;
  std::vector<double> uhat;
  std::vector<Vec> xs;  // query points (when recorded)
  std::vector<Vec> ys;  // running averages (when recorded)
  Vec output;           // y_n
  double grad_bound_used = 0.0;
  bool grad_bound_warning = false;

  std::int64_t iterations() const {
    return static_cast<std::int64_t>(u.size());
  }
};

// The aggregation solver: query the minimizer of the running prox model,
// mix the new prox term in with weight step_i, and average the queries with
// the same weights. Worst-case expected suboptimality 2G^2/(lambda(n+3)).
inline Trace algorithm1(const Problem& problem, const Algo1Config& cfg,
                        RngStream& rng) {
  if (cfg.n < 1) throw std::invalid_argument("algorithm1: n < 1");
  const Domain dom = resolve_domain(problem.domain(), problem.grad_bound(),
                                    problem.lambda(), problem.x1());
  const double lambda = problem.lambda();
  const double G = cfg.grad_bound_override.value_or(problem.grad_bound());
  if (!(G > 0.0)) throw std::invalid_argument("algorithm1: G must be > 0");

  const bool record_points = cfg.record_points.value_or(cfg.n <= 100000);
  Trace trace;
  trace.grad_bound_used = G;
  trace.grad_bound_warning = G < problem.grad_bound();
  trace.u.reserve(cfg.n);
  trace.step.reserve(cfg.n);
  trace.fhat.reserve(cfg.n);
  trace.uhat.reserve(cfg.n);

  Vec x = problem.x1();
  Vec y = x;
  double u = 1.0;
  OracleSample s = problem.sample(x, rng);
  AggregatedProxModel model =
      model_from_term(ProxTerm{x, s.value, s.grad, lambda});
  double fhat = s.value;
  double uhat = fhat - model_min_value(model, dom);

  trace.u.push_back(u);
  trace.step.push_back(1.0);
  trace.fhat.push_back(fhat);
  trace.uhat.push_back(uhat);
  if (record_points) {
    trace.xs.push_back(x);
    trace.ys.push_back(y);
  }

  for (std::int64_t i = 2; i <= cfg.n; ++i) {
    x = model_argmin(model, dom);
    s = problem.sample(x, rng);

    double step = 0.5 * u;  // worst-case schedule
    if (cfg.schedule == StepSchedule::Adaptive && uhat > 0.0)
      step = std::min(1.0, lambda * uhat / (G * G));

    mix_in_place(model, step, ProxTerm{x, s.value, s.grad, lambda});
    scale_add(y, 1.0 - step, step, x);
    fhat = (1.0 - step) * fhat + step * s.value;
    u = u_next(u);
    uhat = fhat - model_min_value(model, dom);

    trace.u.push_back(u);
    trace.step.push_back(step);
    trace.fhat.push_back(fhat);
    trace.uhat.push_back(uhat);
    if (record_points) {
      trace.xs.push_back(x);
      trace.ys.push_back(y);
    }
  }
  trace.output = y;
  return trace;
}

// Rebuild the mixing weights alpha_1..alpha_n by replaying the recorded
// steps: each new step scales all previous weights by (1-step) and appends
// step. sum(alpha) = 1, alpha_n = u_{n-1}/2, and y_n = sum(alpha_i x_i).
inline std::vector<double> reconstruct_weights(const Trace& trace) {
  const std::size_t n = trace.step.size();
  if (n == 0) throw std::invalid_argument("reconstruct_weights: empty trace");
  std::vector<double> alpha;
  alpha.reserve(n);
  alpha.push_back(1.0);
  for (std::size_t i = 1; i < n; ++i) {
    const double s = trace.step[i];
    for (double& a : alpha) a *= 1.0 - s;
    alpha.push_back(s);
  }
  return alpha;
}

// Final iterate plus the uniform average of the queried points; `output` is
// the point a benchmark evaluates.
struct BaselineResult {
  Vec last;
  Vec averaged;
  Vec output;
};

// Projected SGD with step 1/(lambda t). The cited ln(n) G^2/(2 lambda n)
// rate is for the averaged output, so that is the default comparison point.
inline BaselineResult sgd(const Problem& problem, std::int64_t n,
                          RngStream& rng, bool average = true) {
  if (n < 1) throw std::invalid_argument("sgd: n < 1");
  const Domain dom = resolve_domain(problem.domain(), problem.grad_bound(),
                                    problem.lambda(), problem.x1());
  const double lambda = problem.lambda();
  Vec w = problem.x1();
  Vec avg = zeros(w.size());
  for (std::int64_t t = 1; t <= n; ++t) {
    const double tt = static_cast<double>(t);
    scale_add(avg, (tt - 1.0) / tt, 1.0 / tt, w);  // running mean of queries
    const OracleSample s = problem.sample(w, rng);
    w = project(dom, add_scaled(w, -1.0 / (lambda * static_cast<double>(t)),
                                s.grad));
  }
  BaselineResult r;
  r.last = w;
  r.averaged = avg;
  r.output = average ? r.averaged : r.last;
  return r;
}

struct EpochGdConfig {
  std::int64_t initial_epoch_length = 4;  // T_1, doubled each epoch
  std::optional<double> initial_step;     // eta_1, halved; default 1/lambda
};

// Epoch-GD baseline (rate 8 G^2 / (lambda n)): projected SGD in epochs of
// doubling length T_k and halving constant step eta_k, each epoch starting
// from the previous epoch's average and outputting its own average.
inline BaselineResult epoch_gd(const Problem& problem, std::int64_t n,
                               RngStream& rng, EpochGdConfig cfg = {},
                               std::vector<Vec>* epoch_averages = nullptr) {
  if (cfg.initial_epoch_length < 1)
    throw std::invalid_argument("epoch_gd: T1 < 1");
  if (n < cfg.initial_epoch_length)
    throw std::invalid_argument("epoch_gd: budget n smaller than T1");
  const Domain dom = resolve_domain(problem.domain(), problem.grad_bound(),
                                    problem.lambda(), problem.x1());
  const double lambda = problem.lambda();

  Vec w = problem.x1();
  Vec epoch_avg = w;
  std::int64_t remaining = n;
  std::int64_t epoch_len = cfg.initial_epoch_length;
  double eta = cfg.initial_step.value_or(1.0 / lambda);
  while (remaining > 0) {
    const std::int64_t T = std::min(epoch_len, remaining);
    epoch_avg = zeros(w.size());
    for (std::int64_t t = 0; t < T; ++t) {
      axpy(1.0 / static_cast<double>(T), w, epoch_avg);
      const OracleSample s = problem.sample(w, rng);
      w = project(dom, add_scaled(w, -eta, s.grad));
    }
    if (epoch_averages) epoch_averages->push_back(epoch_avg);
    w = epoch_avg;
    remaining -= T;
    epoch_len *= 2;
    eta *= 0.5;
  }
  BaselineResult r;
  r.last = w;
  r.averaged = epoch_avg;
  r.output = epoch_avg;
  return r;
}

struct ErmResult {
  Vec minimizer;
  double suboptimality = 0.0;
};

// Empirical risk minimization with fully revealed sample functions: draw n
// components with the problem's own sampling rule and minimize their average
// exactly (closed form for the quadratic kind, the deterministic inner
// solver otherwise). Rate sigma^2 / (2 lambda n).
inline ErmResult erm(const Problem& problem, std::int64_t n, RngStream& rng) {
  if (n < 1) throw std::invalid_argument("erm: n < 1");
  const std::int64_t draws = n * problem.average_k();
  Vec w;
  if (problem.kind() == ProblemKind::NoisyQuadratic) {
    const QuadraticPayload& q = problem.quadratic_payload();
    const std::size_t d = problem.dim();
    // Average of the sampled components is the quadratic recentered at
    // w_star - mean(xi)/lambda; consume draws exactly as sample() does.
    Vec xi_mean = zeros(d);
    for (std::int64_t i = 0; i < draws; ++i) {
      for (std::size_t c = 0; c < d; ++c)
        xi_mean[c] += rng.uniform(-q.grad_noise, q.grad_noise);
      rng.uniform(-q.value_noise, q.value_noise);  // nu, irrelevant to argmin
    }
    for (double& c : xi_mean) c /= static_cast<double>(draws);
    w = project(problem.domain(),
                add_scaled(q.w_star, -1.0 / problem.lambda(), xi_mean));
  } else {
    const std::vector<DataRow>& base = problem.rows();
    std::vector<DataRow> sampled;
    sampled.reserve(draws);
    for (std::int64_t i = 0; i < draws; ++i)
      sampled.push_back(base[rng.bounded(base.size())]);
    const InnerSolution sol =
        problem.kind() == ProblemKind::FiniteSumHinge
            ? minimize_hinge(sampled, problem.lambda(), problem.domain())
            : minimize_logistic(sampled, problem.lambda(), problem.domain());
    w = project(problem.domain(), sol.point);
  }
  ErmResult r;
  r.minimizer = w;
  r.suboptimality = problem.true_value(w) - problem.true_optimum();
  return r;
}

}  // namespace proxagg
