#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "proxagg/oracle.hpp"
#include "proxagg/rng.hpp"

using namespace proxagg;

namespace {

Problem small_quadratic(double s = 0.5, double a = 1.0) {
  // lambda=1, w*=0, ball of radius 1 around the origin
  return Problem::noisy_quadratic(1.0, Ball{zeros(2), 1.0}, Vec{0.5, 0.0},
                                  zeros(2), s, a);
}

struct MeanStd {
  double mean = 0.0;
  double stderr_mean = 0.0;
};

MeanStd mean_and_stderr(const std::vector<double>& xs) {
  MeanStd r;
  for (double x : xs) r.mean += x;
  r.mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - r.mean) * (x - r.mean);
  var /= static_cast<double>(xs.size() - 1);
  r.stderr_mean = std::sqrt(var / static_cast<double>(xs.size()));
  return r;
}

}  // namespace

TEST_CASE("rng streams are reproducible and independent", "[oracles][rng]") {
  RngStream a(42, {7});
  RngStream b(42, {7});
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  RngStream c(42, {8});
  RngStream d(42, {7});
  int differing = 0;
  for (int i = 0; i < 100; ++i)
    if (c.next_u64() != d.next_u64()) ++differing;
  CHECK(differing > 90);
  CHECK(c.position() == 100);
}

TEST_CASE("noiseless quadratic oracle at the minimizer", "[oracles]") {
  Problem p = Problem::noisy_quadratic(1.0, Ball{zeros(2), 1.0},
                                       Vec{1.0, 0.0}, zeros(2), 0.0, 0.0);
  RngStream rng(1, {0});
  const OracleSample s = p.sample(zeros(2), rng);
  CHECK(s.value == 0.0);
  CHECK(s.grad == zeros(2));
}

TEST_CASE("quadratic oracle is unbiased at a fixed point", "[oracles][mc]") {
  Problem p = small_quadratic(0.5, 1.0);
  const Vec x{0.3, -0.4};
  const double fx = p.true_value(x);  // 0.5 * 0.25 = 0.125
  CHECK(fx == Catch::Approx(0.125).margin(1e-15));

  RngStream rng(7, {1});
  const int n = 100000;
  std::vector<double> values(n);
  Vec grad_sum = zeros(2);
  for (int i = 0; i < n; ++i) {
    const OracleSample s = p.sample(x, rng);
    values[i] = s.value;
    axpy(1.0, s.grad, grad_sum);
  }
  const MeanStd v = mean_and_stderr(values);
  CHECK(std::abs(v.mean - fx) <= 3.0 * v.stderr_mean);

  // E[grad] = lambda (x - w*) = x; per-coordinate noise std is s/sqrt(3)
  const double coord_se = 0.5 / std::sqrt(3.0) / std::sqrt(double(n));
  for (std::size_t c = 0; c < 2; ++c)
    CHECK(std::abs(grad_sum[c] / n - x[c]) <= 4.0 * coord_se);
}

TEST_CASE("singleton finite sum is a deterministic oracle", "[oracles]") {
  Problem p = Problem::finite_sum_hinge(1.0, Ball{zeros(1), 2.0}, Vec{0.0},
                                        {DataRow{{1.0}, 1.0}});
  RngStream rng(3, {0});
  const Vec x{0.25};
  const OracleSample s1 = p.sample(x, rng);
  const OracleSample s2 = p.sample(x, rng);
  CHECK(s1.value == s2.value);
  CHECK(s1.grad == s2.grad);
}

TEST_CASE("true_value closed forms", "[oracles]") {
  Problem q = small_quadratic(0.0, 0.0);
  CHECK(q.true_value(Vec{1.0, 0.0}) == 0.5);

  // two hinge rows at w=0: regularizer 0, each hinge equals 1
  Problem h = Problem::finite_sum_hinge(
      1.0, Ball{zeros(1), 2.0}, Vec{0.0},
      {DataRow{{1.0}, 1.0}, DataRow{{-1.0}, 1.0}});
  CHECK(h.true_value(Vec{0.0}) == 1.0);

  CHECK_THROWS_AS(q.true_value(Vec{5.0, 0.0}), std::invalid_argument);
  RngStream rng(1);
  CHECK_THROWS_AS(q.sample(Vec{5.0, 0.0}, rng), std::invalid_argument);
}

TEST_CASE("true minimizer: quadratic closed form", "[oracles]") {
  Problem p = Problem::noisy_quadratic(1.0, Ball{zeros(2), 1.0},
                                       Vec{1.0, 0.0}, Vec{0.3, -0.2}, 0.1,
                                       0.1);
  CHECK(p.true_minimizer() == Vec{0.3, -0.2});
  CHECK(p.true_optimum() == 0.0);
  CHECK(p.optimum_certificate() == 0.0);

  // w* outside the domain projects onto the boundary
  Problem clipped = Problem::noisy_quadratic(
      2.0, Ball{zeros(1), 1.0}, Vec{0.0}, Vec{3.0}, 0.0, 0.0);
  CHECK(clipped.true_minimizer() == Vec{1.0});
  CHECK(clipped.true_optimum() == Catch::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("true minimizer: hinge singleton matches a grid search",
          "[oracles][oracle-check]") {
  Problem p = Problem::finite_sum_hinge(1.0, Ball{zeros(1), 2.0}, Vec{0.0},
                                        {DataRow{{1.0}, 1.0}});
  // brute-force oracle: scan [-2, 2] at resolution 1e-4
  double best_w = -2.0, best_f = p.true_value(Vec{-2.0});
  for (double w = -2.0; w <= 2.0; w += 1e-4) {
    const double f = p.true_value(Vec{w});
    if (f < best_f) {
      best_f = f;
      best_w = w;
    }
  }
  CHECK(std::abs(p.true_minimizer()[0] - best_w) <= 1e-3);
  CHECK(p.true_optimum() <= best_f + 1e-12);
  CHECK(best_f - p.true_optimum() <= 1e-3);
  // the known solution: w = 1 at the hinge kink, f = 1/2
  CHECK(p.true_minimizer()[0] == Catch::Approx(1.0).margin(1e-9));
  CHECK(p.true_optimum() == Catch::Approx(0.5).margin(1e-9));
}

TEST_CASE("true minimizer: logistic spot check", "[oracles]") {
  RngStream rng(11, {0});
  std::vector<DataRow> rows;
  for (int i = 0; i < 12; ++i) {
    DataRow r;
    r.x = {rng.uniform(-0.7, 0.7), rng.uniform(-0.7, 0.7)};
    r.y = rng.next_double() < 0.5 ? -1.0 : 1.0;
    rows.push_back(r);
  }
  Problem p =
      Problem::finite_sum_logistic(0.5, Ball{zeros(2), 2.0}, zeros(2), rows);
  CHECK(p.optimum_certificate() <= 1e-10 * std::max(1.0, p.true_optimum()));
  RngStream prng(12, {0});
  for (int i = 0; i < 100; ++i) {
    Vec x{prng.uniform(-1.0, 1.0), prng.uniform(-1.0, 1.0)};
    CHECK(p.true_optimum() <= p.true_value(x) + 1e-12);
  }
  // consistency at the minimizer
  CHECK(p.true_value(p.true_minimizer()) ==
        Catch::Approx(p.true_optimum()).margin(1e-9));
}

TEST_CASE("averaged oracle: k=1 is the identity", "[oracles]") {
  Problem base = small_quadratic();
  Problem avg1 = base.averaged_oracle(1);
  CHECK(avg1.noise_variance() == base.noise_variance());
  RngStream r1(5, {0}), r2(5, {0});
  const Vec x{0.2, 0.1};
  for (int i = 0; i < 20; ++i) {
    const OracleSample a = base.sample(x, r1);
    const OracleSample b = avg1.sample(x, r2);
    CHECK(a.value == b.value);
    CHECK(a.grad == b.grad);
  }
  CHECK_THROWS_AS(base.averaged_oracle(0), std::invalid_argument);
}

TEST_CASE("averaged oracle: k=4 divides the gradient variance by 4",
          "[oracles][mc]") {
  const double s = 0.6;
  Problem base = Problem::noisy_quadratic(1.0, Ball{zeros(2), 1.0},
                                          Vec{0.5, 0.0}, zeros(2), s, 0.0);
  Problem avg = base.averaged_oracle(4);
  CHECK(avg.noise_variance() == base.noise_variance() / 4.0);
  CHECK(avg.grad_bound() == base.grad_bound());

  const Vec x{0.3, -0.3};
  const Vec mean_grad = x;  // lambda (x - 0)
  RngStream rng(9, {0});
  const int n = 100000;
  double var = 0.0;
  for (int i = 0; i < n; ++i) {
    const OracleSample smp = avg.sample(x, rng);
    var += dist_sq(smp.grad, mean_grad);
  }
  var /= static_cast<double>(n);
  const double expected = base.noise_variance() / 4.0;
  CHECK(std::abs(var - expected) <= 0.10 * expected);
}

TEST_CASE("averaged oracle: large k obeys the law of large numbers",
          "[oracles][mc]") {
  const double s = 0.8, a = 0.5;
  Problem base = Problem::noisy_quadratic(1.0, Ball{zeros(2), 1.0},
                                          Vec{0.5, 0.0}, zeros(2), s, a);
  Problem avg = base.averaged_oracle(1000000);
  const Vec x{0.4, 0.2};
  // Var(value) = sum_i (x-w*)_i^2 s^2/3 + a^2/3
  const double value_var = norm_sq(x) * s * s / 3.0 + a * a / 3.0;
  RngStream rng(13, {0});
  const OracleSample smp = avg.sample(x, rng);
  CHECK(std::abs(smp.value - base.true_value(x)) <=
        3.0 * std::sqrt(value_var) / 1000.0);
}

TEST_CASE("sampled subgradients never exceed the certified bound",
          "[oracles][property]") {
  RngStream rng(17, {0});
  Problem quad = small_quadratic(0.7, 0.3);
  Problem hinge = Problem::finite_sum_hinge(
      0.5, Ball{zeros(2), 2.0}, zeros(2),
      {DataRow{{0.9, 0.1}, 1.0}, DataRow{{-0.4, 0.6}, -1.0},
       DataRow{{0.0, -1.0}, 1.0}});
  Problem logi = Problem::finite_sum_logistic(
      0.5, Ball{zeros(2), 2.0}, zeros(2),
      {DataRow{{0.9, 0.1}, 1.0}, DataRow{{-0.4, 0.6}, -1.0}});
  for (const Problem& p : {quad, hinge, logi}) {
    const Ball& ball = std::get<Ball>(p.domain());
    for (int i = 0; i < 1000; ++i) {
      Vec dir(p.dim());
      for (double& c : dir) c = next_gaussian(rng);
      const double nrm = norm(dir);
      Vec x = ball.center;
      if (nrm > 0.0)
        axpy(ball.radius * rng.next_double() / nrm, dir, x);
      const OracleSample smp = p.sample(x, rng);
      CHECK(norm(smp.grad) <= p.grad_bound());
      CHECK(std::isfinite(smp.value));
    }
  }
}

TEST_CASE("unbounded domain resolves to the G/lambda ball", "[oracles]") {
  CHECK_THROWS_AS(Problem::noisy_quadratic(1.0, Unbounded{}, Vec{0.0},
                                           Vec{0.0}, 0.1, 0.0),
                  std::invalid_argument);
  Problem p = Problem::noisy_quadratic(0.5, Unbounded{}, Vec{0.0}, Vec{0.0},
                                       0.0, 0.0, 1.0);
  // ball of radius G/lambda = 2 around x1
  const Ball& b = std::get<Ball>(p.domain());
  CHECK(b.center == Vec{0.0});
  CHECK(b.radius == 2.0);
  CHECK(diameter(p.domain()) == 4.0);
}

TEST_CASE("problem construction validation", "[oracles]") {
  CHECK_THROWS_AS(Problem::noisy_quadratic(0.0, Ball{zeros(1), 1.0},
                                           Vec{0.0}, Vec{0.0}, 0.0, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(Problem::noisy_quadratic(1.0, Ball{zeros(1), 1.0},
                                           Vec{2.0}, Vec{0.0}, 0.0, 0.0),
                  std::invalid_argument);  // x1 outside
  CHECK_THROWS_AS(Problem::finite_sum_hinge(1.0, Ball{zeros(1), 1.0},
                                            Vec{0.0}, {}),
                  std::invalid_argument);  // no rows
  CHECK_THROWS_AS(Problem::finite_sum_hinge(1.0, Ball{zeros(1), 1.0},
                                            Vec{0.0},
                                            {DataRow{{1.0}, 0.5}}),
                  std::invalid_argument);  // bad label
  // oversized rows are rescaled to ||x|| <= 1
  Problem p = Problem::finite_sum_hinge(1.0, Ball{zeros(1), 1.0}, Vec{0.0},
                                        {DataRow{{4.0}, 1.0}});
  CHECK(norm(p.rows()[0].x) <= 1.0);
}
