#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <variant>

#include "proxagg/vec.hpp"

namespace proxagg {

// Euclidean ball { x : ||x - center|| <= radius }, radius > 0.
struct Ball {
  Vec center;
  double radius = 1.0;
};

// Axis-aligned box { x : lower <= x <= upper } (coordinatewise).
struct Box {
  Vec lower;
  Vec upper;
};

// User-facing placeholder; solvers resolve it to a Ball before running
// (see resolve_domain in bounds.hpp).
struct Unbounded {};

using Domain = std::variant<Ball, Box, Unbounded>;

inline void validate(const Domain& dom) {
  if (const auto* b = std::get_if<Ball>(&dom)) {
    check_finite(b->center, "Ball center");
    if (!(b->radius > 0.0) || !std::isfinite(b->radius))
      throw std::invalid_argument("Ball: radius must be a positive real");
  } else if (const auto* b = std::get_if<Box>(&dom)) {
    check_finite(b->lower, "Box lower");
    check_finite(b->upper, "Box upper");
    check_same_dim(b->lower, b->upper, "Box");
    for (std::size_t i = 0; i < b->lower.size(); ++i) {
      if (b->lower[i] > b->upper[i])
        throw std::invalid_argument("Box: lower > upper at coordinate " +
                                    std::to_string(i));
    }
  }
}

inline bool is_unbounded(const Domain& dom) {
  return std::holds_alternative<Unbounded>(dom);
}

inline std::size_t domain_dim(const Domain& dom) {
  if (const auto* b = std::get_if<Ball>(&dom)) return b->center.size();
  if (const auto* b = std::get_if<Box>(&dom)) return b->lower.size();
  throw std::invalid_argument("domain_dim: Unbounded domain has no dimension");
}

// Exact Euclidean projection onto a Ball or Box. Interior points (and ball
// boundary points) are returned unchanged.
inline Vec project(const Domain& dom, const Vec& p) {
  if (const auto* b = std::get_if<Ball>(&dom)) {
    check_same_dim(b->center, p, "project(Ball)");
    // Rescale toward the center until the computed distance is within the
    // radius or the point stops moving, so projecting a second time returns
    // the same point bit-for-bit.
    Vec r = p;
    double d = dist(r, b->center);
    while (d > b->radius) {
      const double scale = b->radius / d;
      bool changed = false;
      for (std::size_t i = 0; i < r.size(); ++i) {
        const double ri = b->center[i] + scale * (r[i] - b->center[i]);
        if (ri != r[i]) changed = true;
        r[i] = ri;
      }
      if (!changed) break;
      d = dist(r, b->center);
    }
    return r;
  }
  if (const auto* b = std::get_if<Box>(&dom)) {
    check_same_dim(b->lower, p, "project(Box)");
    Vec r(p.size());
    for (std::size_t i = 0; i < p.size(); ++i)
      r[i] = std::clamp(p[i], b->lower[i], b->upper[i]);
    return r;
  }
  throw std::invalid_argument(
      "project: Unbounded domain must be resolved to a Ball first");
}

// Membership test with absolute slack (projections and boundary points can
// sit an ulp outside the exact set).
inline bool contains(const Domain& dom, const Vec& p, double tol = 0.0) {
  if (const auto* b = std::get_if<Ball>(&dom)) {
    check_same_dim(b->center, p, "contains(Ball)");
    return dist(p, b->center) <= b->radius + tol;
  }
  if (const auto* b = std::get_if<Box>(&dom)) {
    check_same_dim(b->lower, p, "contains(Box)");
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] < b->lower[i] - tol || p[i] > b->upper[i] + tol) return false;
    }
    return true;
  }
  return true;  // Unbounded contains everything
}

// D = max_{x1,x2 in domain} ||x1 - x2||.
inline double diameter(const Domain& dom) {
  if (const auto* b = std::get_if<Ball>(&dom)) return 2.0 * b->radius;
  if (const auto* b = std::get_if<Box>(&dom)) return dist(b->upper, b->lower);
  throw std::invalid_argument("diameter: Unbounded domain has no diameter");
}

// sup_{w in domain} ||w - p||, the farthest distance from p to the domain.
inline double max_dist_to(const Domain& dom, const Vec& p) {
  if (const auto* b = std::get_if<Ball>(&dom)) {
    check_same_dim(b->center, p, "max_dist_to(Ball)");
    return dist(p, b->center) + b->radius;
  }
  if (const auto* b = std::get_if<Box>(&dom)) {
    check_same_dim(b->lower, p, "max_dist_to(Box)");
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double d = std::max(std::abs(p[i] - b->lower[i]),
                                std::abs(p[i] - b->upper[i]));
      s += d * d;
    }
    return std::sqrt(s);
  }
  throw std::invalid_argument("max_dist_to: Unbounded domain");
}

// sup_{w in domain} ||w||.
inline double max_norm_on(const Domain& dom) {
  return max_dist_to(dom, zeros(domain_dim(dom)));
}

}  // namespace proxagg
