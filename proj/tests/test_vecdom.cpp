#include <catch2/catch_amalgamated.hpp>

#include "proxagg/domain.hpp"
#include "proxagg/rng.hpp"
#include "proxagg/vec.hpp"

using namespace proxagg;

namespace {

Vec random_point(RngStream& rng, std::size_t d, double lo, double hi) {
  Vec v(d);
  for (double& c : v) c = rng.uniform(lo, hi);
  return v;
}

// Uniform draw inside a Ball or Box (for feasible comparison points).
Vec random_feasible(const Domain& dom, RngStream& rng) {
  if (const auto* b = std::get_if<Ball>(&dom)) {
    Vec dir(b->center.size());
    for (double& c : dir) c = next_gaussian(rng);
    const double nrm = norm(dir);
    const double r =
        b->radius * std::pow(rng.next_double(),
                             1.0 / static_cast<double>(dir.size()));
    Vec p = b->center;
    if (nrm > 0.0) axpy(r / nrm, dir, p);
    return p;
  }
  const auto& b = std::get<Box>(dom);
  Vec p(b.lower.size());
  for (std::size_t i = 0; i < p.size(); ++i)
    p[i] = rng.uniform(b.lower[i], b.upper[i]);
  return p;
}

}  // namespace

TEST_CASE("ball projection basics", "[vecdom]") {
  const Domain ball = Ball{zeros(2), 1.0};
  CHECK(project(ball, Vec{0.5, 0.0}) == Vec{0.5, 0.0});  // interior fixed
  CHECK(project(ball, Vec{2.0, 0.0}) == Vec{1.0, 0.0});  // radial scaling
  // exact boundary point is fixed
  CHECK(project(ball, Vec{0.0, 1.0}) == Vec{0.0, 1.0});
}

TEST_CASE("box projection clamps coordinatewise", "[vecdom]") {
  const Domain box = Box{zeros(2), Vec{1.0, 1.0}};
  CHECK(project(box, Vec{2.0, -1.0}) == Vec{1.0, 0.0});
  CHECK(project(box, Vec{0.25, 0.75}) == Vec{0.25, 0.75});
}

TEST_CASE("projection rejects unbounded and mismatched input", "[vecdom]") {
  CHECK_THROWS_AS(project(Unbounded{}, Vec{0.0}), std::invalid_argument);
  CHECK_THROWS_AS(project(Ball{zeros(2), 1.0}, Vec{0.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(diameter(Unbounded{}), std::invalid_argument);
}

TEST_CASE("diameter", "[vecdom]") {
  CHECK(diameter(Ball{zeros(3), 1.0}) == 2.0);
  CHECK(diameter(Box{zeros(2), Vec{3.0, 4.0}}) == 5.0);
  // resolved-domain diameter D = 2G/lambda with G=1, lambda=0.5
  CHECK(diameter(Ball{zeros(2), 1.0 / 0.5}) == 4.0);
}

TEST_CASE("domain validation", "[vecdom]") {
  CHECK_THROWS_AS(validate(Domain{Ball{zeros(2), 0.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate(Domain{Ball{zeros(2), -1.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate(Domain{Box{Vec{1.0}, Vec{0.0}}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate(Domain{Ball{Vec{0.0, std::nan("")}, 1.0}}),
                  std::invalid_argument);
  CHECK_NOTHROW(validate(Domain{Box{Vec{1.0}, Vec{1.0}}}));
}

TEST_CASE("projection idempotence is exact", "[vecdom][property]") {
  RngStream rng(101, {0});
  const Domain domains[] = {
      Domain{Ball{Vec{0.3, -0.7, 1.1}, 0.9}},
      Domain{Box{Vec{-1.0, 0.0, 2.0}, Vec{1.0, 0.5, 3.0}}},
  };
  for (const Domain& dom : domains) {
    for (int k = 0; k < 1000; ++k) {
      const Vec p = random_point(rng, 3, -4.0, 4.0);
      const Vec q = project(dom, p);
      CHECK(project(dom, q) == q);
    }
  }
}

TEST_CASE("projection optimality against random feasible points",
          "[vecdom][property]") {
  RngStream rng(102, {0});
  const Domain domains[] = {
      Domain{Ball{Vec{0.5, -0.5}, 1.25}},
      Domain{Box{Vec{-2.0, 1.0}, Vec{0.0, 1.5}}},
  };
  for (const Domain& dom : domains) {
    for (int k = 0; k < 1000; ++k) {
      const Vec p = random_point(rng, 2, -5.0, 5.0);
      const Vec q = random_feasible(dom, rng);
      REQUIRE(contains(dom, q, 1e-12));
      CHECK(dist(project(dom, p), p) <= dist(q, p) + 1e-12);
    }
  }
}

TEST_CASE("projection is nonexpansive", "[vecdom][property]") {
  RngStream rng(103, {0});
  const Domain domains[] = {
      Domain{Ball{Vec{-0.25, 0.0, 0.5, 1.0}, 2.0}},
      Domain{Box{Vec{-1.0, -1.0, -1.0, -1.0}, Vec{1.0, 2.0, 3.0, 4.0}}},
  };
  for (const Domain& dom : domains) {
    for (int k = 0; k < 1000; ++k) {
      const Vec a = random_point(rng, 4, -6.0, 6.0);
      const Vec b = random_point(rng, 4, -6.0, 6.0);
      CHECK(dist(project(dom, a), project(dom, b)) <= dist(a, b) + 1e-12);
    }
  }
}

TEST_CASE("vector helpers reject dimension mismatch", "[vecdom]") {
  CHECK_THROWS_AS(dot(Vec{1.0}, Vec{1.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(dist(Vec{1.0, 2.0}, Vec{1.0}), std::invalid_argument);
  CHECK_THROWS_AS(contains(Ball{zeros(2), 1.0}, Vec{0.0}),
                  std::invalid_argument);
}
