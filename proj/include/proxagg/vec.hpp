#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace proxagg {

// Dense point/vector type. Dimensions are fixed per problem instance;
// every combining operation rejects mismatched dimensions.
using Vec = std::vector<double>;

inline void check_same_dim(const Vec& a, const Vec& b, const char* where) {
  if (a.size() != b.size()) {
    throw std::invalid_argument(std::string(where) + ": dimension mismatch (" +
                                std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()) + ")");
  }
}

inline void check_finite(const Vec& v, const char* where) {
  for (double c : v) {
    if (!std::isfinite(c)) {
      throw std::invalid_argument(std::string(where) +
                                  ": non-finite coordinate");
    }
  }
}

inline double dot(const Vec& a, const Vec& b) {
  check_same_dim(a, b, "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm_sq(const Vec& a) { return dot(a, a); }

inline double norm(const Vec& a) { return std::sqrt(norm_sq(a)); }

inline double dist_sq(const Vec& a, const Vec& b) {
  check_same_dim(a, b, "dist_sq");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

inline double dist(const Vec& a, const Vec& b) {
  return std::sqrt(dist_sq(a, b));
}

inline Vec zeros(std::size_t d) { return Vec(d, 0.0); }

// a + c*b
inline Vec add_scaled(const Vec& a, double c, const Vec& b) {
  check_same_dim(a, b, "add_scaled");
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + c * b[i];
  return r;
}

inline Vec sub(const Vec& a, const Vec& b) { return add_scaled(a, -1.0, b); }

inline Vec scaled(const Vec& a, double c) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = c * a[i];
  return r;
}

// y <- y + c*x, in place
inline void axpy(double c, const Vec& x, Vec& y) {
  check_same_dim(x, y, "axpy");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += c * x[i];
}

// a <- s*a + c*x, in place (affine combination step)
inline void scale_add(Vec& a, double s, double c, const Vec& x) {
  check_same_dim(a, x, "scale_add");
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = s * a[i] + c * x[i];
}

}  // namespace proxagg
