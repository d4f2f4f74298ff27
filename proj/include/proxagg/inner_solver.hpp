#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "proxagg/domain.hpp"
#include "proxagg/vec.hpp"

namespace proxagg {

// One labeled example; labels are -1/+1 and features are kept at ||x|| <= 1.
struct DataRow {
  Vec x;
  double y = 1.0;
};

// Deterministic high-accuracy minimizer output. `certificate` is a proven
// upper bound on point's suboptimality for the problem it was solved on.
struct InnerSolution {
  Vec point;
  double objective = 0.0;
  double certificate = 0.0;
};

namespace detail {

// Suboptimality certificate from strong convexity, constrained form: for any
// subgradient g of f at w,
//   f(w) - min_D f <= -min_{v in D} { <g, v-w> + lambda/2 ||v-w||^2 },
// and the inner min is attained at v = project(D, w - g/lambda). Reduces to
// ||g||^2 / (2 lambda) on an inactive domain.
inline double strong_convexity_certificate(const Vec& w, const Vec& g,
                                           double lambda, const Domain& dom) {
  const Vec v = project(dom, add_scaled(w, -1.0 / lambda, g));
  const Vec step = sub(v, w);
  return -(dot(g, step) + 0.5 * lambda * norm_sq(step));
}

inline double logistic_loss(double margin) {
  // log(1 + exp(-margin)), stable for both signs
  if (margin > 0.0) return std::log1p(std::exp(-margin));
  return -margin + std::log1p(std::exp(margin));
}

inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace detail

// Full objective lambda/2 ||w||^2 + (1/m) sum_j log(1+exp(-y_j <x_j, w>)).
inline double logistic_objective(const std::vector<DataRow>& rows,
                                 double lambda, const Vec& w) {
  double loss = 0.0;
  for (const DataRow& r : rows)
    loss += detail::logistic_loss(r.y * dot(r.x, w));
  return 0.5 * lambda * norm_sq(w) + loss / static_cast<double>(rows.size());
}

// Full objective lambda/2 ||w||^2 + (1/m) sum_j max(0, 1 - y_j <x_j, w>).
inline double hinge_objective(const std::vector<DataRow>& rows, double lambda,
                              const Vec& w) {
  double loss = 0.0;
  for (const DataRow& r : rows)
    loss += std::max(0.0, 1.0 - r.y * dot(r.x, w));
  return 0.5 * lambda * norm_sq(w) + loss / static_cast<double>(rows.size());
}

// Projected full-gradient descent for the logistic objective, stopping on the
// strong-convexity certificate <= tol_rel * max(1, |objective|).
inline InnerSolution minimize_logistic(const std::vector<DataRow>& rows,
                                       double lambda, const Domain& dom,
                                       double tol_rel = 1e-10) {
  if (rows.empty()) throw std::invalid_argument("minimize_logistic: no rows");
  const std::size_t d = rows[0].x.size();
  const double m = static_cast<double>(rows.size());
  // Smoothness constant: logistic curvature <= ||x||^2 / 4 per row.
  double curv = 0.0;
  for (const DataRow& r : rows) curv += 0.25 * norm_sq(r.x);
  const double step = 1.0 / (lambda + curv / m);

  Vec w = project(dom, zeros(d));
  Vec grad(d);
  for (int iter = 0; iter < 200000; ++iter) {
    std::fill(grad.begin(), grad.end(), 0.0);
    for (const DataRow& r : rows) {
      const double coef = -r.y * detail::sigmoid(-r.y * dot(r.x, w)) / m;
      axpy(coef, r.x, grad);
    }
    axpy(lambda, w, grad);
    const double obj = logistic_objective(rows, lambda, w);
    const double cert =
        detail::strong_convexity_certificate(w, grad, lambda, dom);
    if (cert <= tol_rel * std::max(1.0, std::abs(obj)))
      return {w, obj, std::max(cert, 0.0)};
    w = project(dom, add_scaled(w, -step, grad));
  }
  throw std::runtime_error(
      "minimize_logistic: failed to reach the suboptimality certificate");
}

// Deterministic cyclic dual coordinate ascent for the hinge objective
// (the classic SVM dual: maximize (1/m) sum_j g_j - 1/(2 lambda) ||v||^2 over
// g in [0,1]^m, with v = (1/m) sum_j g_j y_j x_j and w = v/lambda). The
// primal-dual gap is the suboptimality certificate. Plain subgradient descent
// cannot certify here: the minimizer generically sits on hinge kinks where a
// one-sided subgradient selection stays bounded away from zero.
inline InnerSolution minimize_hinge(const std::vector<DataRow>& rows,
                                    double lambda, const Domain& dom,
                                    double tol_rel = 1e-10) {
  if (rows.empty()) throw std::invalid_argument("minimize_hinge: no rows");
  const std::size_t d = rows[0].x.size();
  const double m = static_cast<double>(rows.size());

  std::vector<double> gamma(rows.size(), 0.0);
  std::vector<double> xsq(rows.size());
  for (std::size_t j = 0; j < rows.size(); ++j) xsq[j] = norm_sq(rows[j].x);

  Vec w = zeros(d);
  double dual_lin = 0.0;  // (1/m) sum_j gamma_j
  for (int sweep = 0; sweep < 500000; ++sweep) {
    if (sweep % 64 == 63) {
      // refresh w and the dual linear term from gamma to cancel incremental
      // rounding drift before testing the gap
      w = zeros(d);
      dual_lin = 0.0;
      for (std::size_t j = 0; j < rows.size(); ++j) {
        if (gamma[j] != 0.0) {
          axpy(gamma[j] * rows[j].y / (lambda * m), rows[j].x, w);
          dual_lin += gamma[j] / m;
        }
      }
    }
    for (std::size_t j = 0; j < rows.size(); ++j) {
      double target;
      if (xsq[j] == 0.0) {
        target = 1.0;  // loss is constant 1; the dual linear term wants 1
      } else {
        const double margin = 1.0 - rows[j].y * dot(rows[j].x, w);
        target = std::clamp(gamma[j] + lambda * m * margin / xsq[j], 0.0, 1.0);
      }
      const double delta = target - gamma[j];
      if (delta != 0.0) {
        gamma[j] = target;
        dual_lin += delta / m;
        axpy(delta * rows[j].y / (lambda * m), rows[j].x, w);
      }
    }
    const double primal = hinge_objective(rows, lambda, w);
    const double dual = dual_lin - 0.5 * lambda * norm_sq(w);
    const double gap = primal - dual;
    if (gap <= tol_rel * std::max(1.0, std::abs(primal))) {
      if (!contains(dom, w, 1e-9 * std::max(1.0, norm(w)))) {
        // The certificate covers the constrained problem only when the
        // unconstrained minimizer is feasible.
        throw std::runtime_error(
            "minimize_hinge: minimizer falls outside the domain; enlarge the "
            "domain or reduce lambda");
      }
      return {w, primal, std::max(gap, 0.0)};
    }
  }
  throw std::runtime_error(
      "minimize_hinge: failed to reach the suboptimality certificate");
}

}  // namespace proxagg
