#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

#include "proxagg/bounds.hpp"
#include "proxagg/domain.hpp"
#include "proxagg/inner_solver.hpp"
#include "proxagg/rng.hpp"
#include "proxagg/vec.hpp"

namespace proxagg {

// One stochastic first-order observation at a query point: an unbiased
// value estimate and an unbiased subgradient estimate.
struct OracleSample {
  double value = 0.0;
  Vec grad;
};

enum class ProblemKind { NoisyQuadratic, FiniteSumHinge, FiniteSumLogistic };

inline const char* to_string(ProblemKind k) {
  switch (k) {
    case ProblemKind::NoisyQuadratic: return "noisy_quadratic";
    case ProblemKind::FiniteSumHinge: return "finite_sum_hinge";
    case ProblemKind::FiniteSumLogistic: return "finite_sum_logistic";
  }
  return "?";
}

// f(w) = lambda/2 ||w - w_star||^2, sampled as
// f~(w) = f(w) + <xi, w - w_star> + nu with xi uniform on [-s,s]^d and nu
// uniform on [-a,a]. Bounded (not Gaussian) noise keeps G and Gtilde finite.
struct QuadraticPayload {
  Vec w_star;
  double grad_noise = 0.0;   // s
  double value_noise = 0.0;  // a
};

// f~(w) = lambda/2 ||w||^2 + loss on one uniformly drawn row.
struct FiniteSumPayload {
  std::vector<DataRow> rows;
};

// A synthetic lambda-strongly convex objective with a sampling rule, exact
// true objective, and analytically certified constants G, Gtilde, sigma^2.
// Immutable after construction; sampling takes an exclusive RngStream.
class Problem {
 public:
  static Problem noisy_quadratic(
      double lambda, Domain domain, Vec x1, Vec w_star, double grad_noise,
      double value_noise, std::optional<double> unbounded_grad_bound = {});

  static Problem finite_sum_hinge(
      double lambda, Domain domain, Vec x1, std::vector<DataRow> rows,
      std::optional<double> unbounded_grad_bound = {});

  static Problem finite_sum_logistic(
      double lambda, Domain domain, Vec x1, std::vector<DataRow> rows,
      std::optional<double> unbounded_grad_bound = {});

  ProblemKind kind() const { return kind_; }
  std::size_t dim() const { return x1_.size(); }
  double lambda() const { return lambda_; }
  // Always Ball or Box: an Unbounded input is resolved at construction.
  const Domain& domain() const { return domain_; }
  const Vec& x1() const { return x1_; }
  double grad_bound() const { return grad_bound_; }
  double noise_bound() const { return noise_bound_; }
  double noise_variance() const { return noise_variance_; }
  int average_k() const { return average_k_; }
  const QuadraticPayload& quadratic_payload() const;
  const std::vector<DataRow>& rows() const;

  // One realization of {f~(x), grad f~(x)}; E[value] = f(x) and
  // E[grad] is a subgradient of f at x.
  OracleSample sample(const Vec& x, RngStream& rng) const;

  // Exact deterministic f(x): closed form for the quadratic, full-sum
  // average for the finite-sum kinds.
  double true_value(const Vec& x) const;

  const Vec& true_minimizer() const { return minimizer_; }
  double true_optimum() const { return optimum_; }
  // Certified suboptimality slack of true_optimum (0 for closed forms).
  double optimum_certificate() const { return optimum_certificate_; }

  // Derived problem whose sample is the mean of k independent base samples.
  // Variance scales by 1/k; grad bound and true values are unchanged.
  Problem averaged_oracle(int k) const {
    if (k < 1) throw std::invalid_argument("averaged_oracle: k < 1");
    Problem p = *this;
    p.average_k_ *= k;
    p.noise_variance_ = noise_variance_ / static_cast<double>(k);
    return p;
  }

  BoundParams bound_params() const {
    BoundParams p;
    p.lambda = lambda_;
    p.G = grad_bound_;
    p.Gtilde = noise_bound_;
    p.sigma2 = noise_variance_;
    p.D = diameter(domain_);
    return p;
  }

 private:
  Problem() = default;

  OracleSample sample_once(const Vec& x, RngStream& rng) const;
  void check_in_domain(const Vec& x, const char* where) const;
  void finish_setup(std::optional<double> unbounded_grad_bound);

  ProblemKind kind_ = ProblemKind::NoisyQuadratic;
  double lambda_ = 1.0;
  Domain domain_ = Unbounded{};
  Vec x1_;
  double grad_bound_ = 0.0;
  double noise_bound_ = 0.0;
  double noise_variance_ = 0.0;
  int average_k_ = 1;
  std::variant<QuadraticPayload, FiniteSumPayload> payload_;

  Vec minimizer_;
  double optimum_ = 0.0;
  double optimum_certificate_ = 0.0;
};

inline const QuadraticPayload& Problem::quadratic_payload() const {
  if (kind_ != ProblemKind::NoisyQuadratic)
    throw std::logic_error("quadratic_payload: wrong problem kind");
  return std::get<QuadraticPayload>(payload_);
}

inline const std::vector<DataRow>& Problem::rows() const {
  if (kind_ == ProblemKind::NoisyQuadratic)
    throw std::logic_error("rows: wrong problem kind");
  return std::get<FiniteSumPayload>(payload_).rows;
}

inline void Problem::check_in_domain(const Vec& x, const char* where) const {
  check_same_dim(x, x1_, where);
  const double scale = std::max(1.0, norm(x));
  if (!contains(domain_, x, 1e-9 * scale))
    throw std::invalid_argument(std::string(where) + ": point outside domain");
}

inline void Problem::finish_setup(std::optional<double> unbounded_grad_bound) {
  check_finite(x1_, "Problem x1");
  if (!(lambda_ > 0.0) || !std::isfinite(lambda_))
    throw std::invalid_argument("Problem: lambda must be a positive real");
  validate(domain_);
  if (is_unbounded(domain_)) {
    if (!unbounded_grad_bound)
      throw std::invalid_argument(
          "Problem: an Unbounded domain needs an explicit grad_bound to "
          "resolve the ball radius G/lambda");
    domain_ = resolve_domain(domain_, *unbounded_grad_bound, lambda_, x1_);
  }
  if (domain_dim(domain_) != x1_.size())
    throw std::invalid_argument("Problem: domain/x1 dimension mismatch");
  if (!contains(domain_, x1_, 1e-12 * std::max(1.0, norm(x1_))))
    throw std::invalid_argument("Problem: x1 outside domain");

  // Certified constants and the exact minimizer, per kind.
  if (kind_ == ProblemKind::NoisyQuadratic) {
    const auto& q = std::get<QuadraticPayload>(payload_);
    const double sqd =
        q.grad_noise * std::sqrt(static_cast<double>(x1_.size()));
    grad_bound_ = lambda_ * max_dist_to(domain_, q.w_star) + sqd;
    noise_bound_ = sqd;
    noise_variance_ = static_cast<double>(x1_.size()) * q.grad_noise *
                      q.grad_noise / 3.0;
    minimizer_ = project(domain_, q.w_star);
    optimum_ = true_value(minimizer_);
    optimum_certificate_ = 0.0;
  } else {
    auto& fs = std::get<FiniteSumPayload>(payload_);
    if (fs.rows.empty())
      throw std::invalid_argument("Problem: finite-sum payload needs rows");
    double max_row = 0.0;
    for (const DataRow& r : fs.rows) {
      check_finite(r.x, "Problem row");
      check_same_dim(r.x, x1_, "Problem row");
      if (r.y != 1.0 && r.y != -1.0)
        throw std::invalid_argument("Problem: labels must be -1 or +1");
      max_row = std::max(max_row, norm(r.x));
    }
    if (max_row > 1.0) {
      // keep ||row|| <= 1 so G = lambda max||w|| + 1 certifies
      for (DataRow& r : fs.rows)
        for (double& c : r.x) c /= max_row;
      max_row = 1.0;
    }
    double sumsq = 0.0;
    for (const DataRow& r : fs.rows) sumsq += norm_sq(r.x);
    grad_bound_ = lambda_ * max_norm_on(domain_) + max_row;
    noise_bound_ = 2.0 * max_row;
    noise_variance_ = sumsq / static_cast<double>(fs.rows.size());

    const InnerSolution sol =
        kind_ == ProblemKind::FiniteSumHinge
            ? minimize_hinge(fs.rows, lambda_, domain_)
            : minimize_logistic(fs.rows, lambda_, domain_);
    minimizer_ = project(domain_, sol.point);
    optimum_ = sol.objective;
    optimum_certificate_ = sol.certificate;
  }
  if (!(grad_bound_ > 0.0))
    throw std::invalid_argument("Problem: certified grad bound is zero");
}

inline Problem Problem::noisy_quadratic(
    double lambda, Domain domain, Vec x1, Vec w_star, double grad_noise,
    double value_noise, std::optional<double> unbounded_grad_bound) {
  if (grad_noise < 0.0 || value_noise < 0.0)
    throw std::invalid_argument("noisy_quadratic: negative noise bound");
  check_finite(w_star, "noisy_quadratic w_star");
  check_same_dim(w_star, x1, "noisy_quadratic");
  Problem p;
  p.kind_ = ProblemKind::NoisyQuadratic;
  p.lambda_ = lambda;
  p.domain_ = std::move(domain);
  p.x1_ = std::move(x1);
  p.payload_ = QuadraticPayload{std::move(w_star), grad_noise, value_noise};
  p.finish_setup(unbounded_grad_bound);
  return p;
}

inline Problem Problem::finite_sum_hinge(
    double lambda, Domain domain, Vec x1, std::vector<DataRow> rows,
    std::optional<double> unbounded_grad_bound) {
  Problem p;
  p.kind_ = ProblemKind::FiniteSumHinge;
  p.lambda_ = lambda;
  p.domain_ = std::move(domain);
  p.x1_ = std::move(x1);
  p.payload_ = FiniteSumPayload{std::move(rows)};
  p.finish_setup(unbounded_grad_bound);
  return p;
}

inline Problem Problem::finite_sum_logistic(
    double lambda, Domain domain, Vec x1, std::vector<DataRow> rows,
    std::optional<double> unbounded_grad_bound) {
  Problem p;
  p.kind_ = ProblemKind::FiniteSumLogistic;
  p.lambda_ = lambda;
  p.domain_ = std::move(domain);
  p.x1_ = std::move(x1);
  p.payload_ = FiniteSumPayload{std::move(rows)};
  p.finish_setup(unbounded_grad_bound);
  return p;
}

inline double Problem::true_value(const Vec& x) const {
  check_in_domain(x, "true_value");
  if (kind_ == ProblemKind::NoisyQuadratic) {
    const auto& q = std::get<QuadraticPayload>(payload_);
    return 0.5 * lambda_ * dist_sq(x, q.w_star);
  }
  const auto& rows = std::get<FiniteSumPayload>(payload_).rows;
  return kind_ == ProblemKind::FiniteSumHinge
             ? hinge_objective(rows, lambda_, x)
             : logistic_objective(rows, lambda_, x);
}

// Draw order is part of the reproducibility contract: the quadratic kind
// consumes d uniforms for xi then one for nu; the finite-sum kinds consume
// one bounded draw for the row index. Averaged problems consume k such
// blocks in sequence.
inline OracleSample Problem::sample_once(const Vec& x, RngStream& rng) const {
  if (kind_ == ProblemKind::NoisyQuadratic) {
    const auto& q = std::get<QuadraticPayload>(payload_);
    OracleSample s;
    s.grad.resize(x.size());
    double noise_dot = 0.0;  // <xi, x - w_star>
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double xi = rng.uniform(-q.grad_noise, q.grad_noise);
      s.grad[i] = lambda_ * (x[i] - q.w_star[i]) + xi;
      noise_dot += xi * (x[i] - q.w_star[i]);
    }
    const double nu = rng.uniform(-q.value_noise, q.value_noise);
    s.value = 0.5 * lambda_ * dist_sq(x, q.w_star) + noise_dot + nu;
    return s;
  }
  const auto& rows = std::get<FiniteSumPayload>(payload_).rows;
  const DataRow& r = rows[rng.bounded(rows.size())];
  OracleSample s;
  s.grad = scaled(x, lambda_);
  if (kind_ == ProblemKind::FiniteSumHinge) {
    const double margin = 1.0 - r.y * dot(r.x, x);
    s.value = 0.5 * lambda_ * norm_sq(x) + std::max(0.0, margin);
    if (margin > 0.0) axpy(-r.y, r.x, s.grad);
  } else {
    const double margin = r.y * dot(r.x, x);
    s.value = 0.5 * lambda_ * norm_sq(x) + detail::logistic_loss(margin);
    axpy(-r.y * detail::sigmoid(-margin), r.x, s.grad);
  }
  return s;
}

inline OracleSample Problem::sample(const Vec& x, RngStream& rng) const {
  check_in_domain(x, "sample");
  if (average_k_ == 1) return sample_once(x, rng);
  OracleSample acc = sample_once(x, rng);
  for (int i = 1; i < average_k_; ++i) {
    const OracleSample s = sample_once(x, rng);
    acc.value += s.value;
    axpy(1.0, s.grad, acc.grad);
  }
  const double inv = 1.0 / static_cast<double>(average_k_);
  acc.value *= inv;
  for (double& c : acc.grad) c *= inv;
  return acc;
}

}  // namespace proxagg
