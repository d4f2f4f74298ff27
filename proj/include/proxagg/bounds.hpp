#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "proxagg/domain.hpp"
#include "proxagg/prox_model.hpp"
#include "proxagg/vec.hpp"

namespace proxagg {

// Certified constants feeding every rate and high-probability bound:
//   lambda — strong convexity modulus
//   G      — max stochastic subgradient norm
//   Gtilde — max noise-gradient norm, max ||grad(f_i - f)||
//   sigma2 — max variance of the stochastic subgradient
//   D      — domain diameter
struct BoundParams {
  double lambda = 1.0;
  double G = 1.0;
  double Gtilde = 0.0;
  double sigma2 = 0.0;
  double D = 1.0;

  void validate() const {
    if (!(lambda > 0.0)) throw std::invalid_argument("BoundParams: lambda <= 0");
    if (!(G > 0.0)) throw std::invalid_argument("BoundParams: G <= 0");
    if (Gtilde < 0.0 || sigma2 < 0.0)
      throw std::invalid_argument("BoundParams: negative Gtilde or sigma2");
    if (!(D > 0.0)) throw std::invalid_argument("BoundParams: D <= 0");
    // Gtilde <= 2G: the noise gradient is a difference of two subgradients,
    // each of norm <= G. sigma2 <= G^2 since the noise gradient second
    // moment cannot exceed the squared range.
    if (Gtilde > 2.0 * G + 1e-12)
      throw std::invalid_argument("BoundParams: Gtilde exceeds 2G");
    if (sigma2 > G * G + 1e-12)
      throw std::invalid_argument("BoundParams: sigma2 exceeds G^2");
  }
};

// Worst-case expected suboptimality of the aggregation solver after n
// oracle calls: 2 G^2 / (lambda (n+3)).
inline double algo1_rate(std::int64_t n, const BoundParams& p) {
  if (n < 1) throw std::invalid_argument("algo1_rate: n < 1");
  return 2.0 * p.G * p.G / (p.lambda * static_cast<double>(n + 3));
}

// Epoch-GD: 8 G^2 / (lambda n).
inline double epoch_gd_rate(std::int64_t n, const BoundParams& p) {
  if (n < 1) throw std::invalid_argument("epoch_gd_rate: n < 1");
  return 8.0 * p.G * p.G / (p.lambda * static_cast<double>(n));
}

// Averaged SGD: ln(n) G^2 / (2 lambda n). Needs n >= 2 (ln(1) = 0 is
// degenerate as a bound).
inline double sgd_rate(std::int64_t n, const BoundParams& p) {
  if (n < 2) throw std::invalid_argument("sgd_rate: n < 2");
  return std::log(static_cast<double>(n)) * p.G * p.G /
         (2.0 * p.lambda * static_cast<double>(n));
}

// Cutting-plane/bundle method: 8 G^2 / (lambda [n+2 - log2(lambda f(x1) / (4 G^2))]).
// Comparison-table quantity only; f(x1) is an explicit input.
inline double bundle_rate(std::int64_t n, const BoundParams& p, double f_x1) {
  if (n < 1) throw std::invalid_argument("bundle_rate: n < 1");
  const double arg = p.lambda * f_x1 / (4.0 * p.G * p.G);
  if (!(arg > 0.0))
    throw std::invalid_argument("bundle_rate: lambda*f(x1)/(4G^2) must be > 0");
  const double denom = static_cast<double>(n + 2) - std::log2(arg);
  if (!(denom > 0.0))
    throw std::invalid_argument("bundle_rate: nonpositive denominator");
  return 8.0 * p.G * p.G / (p.lambda * denom);
}

// ERM with fully revealed sample functions: sigma^2 / (2 lambda n).
inline double erm_rate(std::int64_t n, const BoundParams& p) {
  if (n < 1) throw std::invalid_argument("erm_rate: n < 1");
  return p.sigma2 / (2.0 * p.lambda * static_cast<double>(n));
}

// Markov threshold: Pr(S >= 2G^2/(lambda (n+3) eta)) <= eta.
inline double hp_markov(std::int64_t n, const BoundParams& p, double eta) {
  if (!(eta > 0.0 && eta < 1.0))
    throw std::invalid_argument("hp_markov: eta outside (0,1)");
  return algo1_rate(n, p) / eta;
}

enum class TailKind { Chernoff, Azuma, Bennett };

// Tail bound on Pr( S(y_n) >= t + 2G^2/(lambda (n+3)) ) after n oracle calls.
//   Chernoff: exp{ -t^2 (n+2) / (16 D^2 sigma^2) }
//   Azuma:    min(1, 1/2 exp{ -t^2 (n+2) / (8 Gtilde^2 D^2) })
//   Bennett:  exp{ -(t (n+2) / (4 Gtilde D)) ln(1 + t Gtilde / (2 D sigma^2)) }
// The Azuma form is capped at 1 so it stays a probability for all inputs.
inline double hp_tail(TailKind kind, double t, std::int64_t n,
                      const BoundParams& p) {
  if (t < 0.0) throw std::invalid_argument("hp_tail: t < 0");
  if (n < 1) throw std::invalid_argument("hp_tail: n < 1");
  const double np2 = static_cast<double>(n + 2);
  switch (kind) {
    case TailKind::Chernoff: {
      if (!(p.sigma2 > 0.0))
        throw std::invalid_argument("hp_tail(Chernoff): sigma2 must be > 0");
      return std::exp(-t * t * np2 / (16.0 * p.D * p.D * p.sigma2));
    }
    case TailKind::Azuma: {
      if (!(p.Gtilde > 0.0))
        throw std::invalid_argument("hp_tail(Azuma): Gtilde must be > 0");
      const double v =
          0.5 * std::exp(-t * t * np2 / (8.0 * p.Gtilde * p.Gtilde * p.D * p.D));
      return std::min(1.0, v);
    }
    case TailKind::Bennett: {
      if (!(p.Gtilde > 0.0 && p.sigma2 > 0.0))
        throw std::invalid_argument(
            "hp_tail(Bennett): Gtilde and sigma2 must be > 0");
      return std::exp(-(t * np2 / (4.0 * p.Gtilde * p.D)) *
                      std::log1p(t * p.Gtilde / (2.0 * p.D * p.sigma2)));
    }
  }
  throw std::invalid_argument("hp_tail: unknown kind");
}

// Smallest t with hp_tail(kind, t, n, p) <= eta, by monotone bisection to
// 1e-10 relative. Returns 0 when eta already covers the t=0 value.
inline double hp_invert(TailKind kind, double eta, std::int64_t n,
                        const BoundParams& p) {
  if (!(eta > 0.0 && eta < 1.0))
    throw std::invalid_argument("hp_invert: eta outside (0,1)");
  if (hp_tail(kind, 0.0, n, p) <= eta) return 0.0;
  double lo = 0.0, hi = 1.0;
  int steps = 0;
  while (hp_tail(kind, hi, n, p) > eta) {
    hi *= 2.0;
    if (++steps > 200)
      throw std::runtime_error("hp_invert: failed to bracket eta");
  }
  steps = 0;
  while (hi - lo > 1e-10 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (hp_tail(kind, mid, n, p) <= eta) {
      hi = mid;
    } else {
      lo = mid;
    }
    if (++steps > 200)
      throw std::runtime_error("hp_invert: bisection did not converge");
  }
  return hi;
}

// Ball and Box pass through; an Unbounded domain becomes the ball
// { ||x - x1|| <= G/lambda }, which always contains the minimizer (strong
// convexity puts it within G/lambda of any start), so D = 2G/lambda.
inline Domain resolve_domain(const Domain& dom, double G, double lambda,
                             const Vec& x1) {
  if (!is_unbounded(dom)) return dom;
  if (!(G > 0.0) || !(lambda > 0.0))
    throw std::invalid_argument("resolve_domain: need G > 0 and lambda > 0");
  return Ball{x1, G / lambda};
}

// Cutting-plane lower bound: max_i p_i(x). Each prox term under-estimates a
// lambda-strongly convex f when built from exact oracles, and the max is the
// unimprovable lower model.
inline double cutting_plane_lower(const std::vector<ProxTerm>& terms,
                                  const Vec& x) {
  if (terms.empty())
    throw std::invalid_argument("cutting_plane_lower: empty term list");
  double best = evaluate(terms[0], x);
  for (std::size_t i = 1; i < terms.size(); ++i) {
    if (terms[i].lambda != terms[0].lambda)
      throw std::invalid_argument("cutting_plane_lower: inconsistent lambda");
    best = std::max(best, evaluate(terms[i], x));
  }
  return best;
}

struct JensenUpper {
  Vec y;
  double bound = 0.0;
};

// Jensen upper bound for strongly convex f:
//   f(y) <= sum_i a_i f(x_i) - lambda/2 sum_i a_i ||x_i - y||^2,
// with y = sum_i a_i x_i. Tight for pure quadratics.
inline JensenUpper jensen_upper(const std::vector<Vec>& anchors,
                                const std::vector<double>& fvals,
                                const std::vector<double>& weights,
                                double lambda) {
  if (anchors.empty() || anchors.size() != fvals.size() ||
      anchors.size() != weights.size())
    throw std::invalid_argument("jensen_upper: list size mismatch or empty");
  double wsum = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw std::invalid_argument("jensen_upper: negative weight");
    wsum += w;
  }
  if (std::abs(wsum - 1.0) > 1e-12)
    throw std::invalid_argument("jensen_upper: weights do not sum to 1");

  JensenUpper r;
  r.y = zeros(anchors[0].size());
  for (std::size_t i = 0; i < anchors.size(); ++i)
    axpy(weights[i], anchors[i], r.y);
  double avg = 0.0, spread = 0.0;
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    avg += weights[i] * fvals[i];
    spread += weights[i] * dist_sq(anchors[i], r.y);
  }
  r.bound = avg - 0.5 * lambda * spread;
  return r;
}

}  // namespace proxagg
