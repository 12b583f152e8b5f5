#include "qcagd/instances.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <doctest.h>

#include <cmath>
#include <random>

using namespace qcagd;

namespace {

// Adaptive Gauss-Kronrod integration of the defining integrand.
double upsilon_quadrature(double theta) {
  auto integrand = [](double t) { return 120.0 * t * t * (t - 1.0) / (1.0 + t * t); };
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      integrand, 1.0, theta, 15, 1e-14);
}

Vector uniform_vector(Index n, std::mt19937_64& rng, double lo = -2.0, double hi = 3.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vector x(n);
  for (Index i = 0; i < n; ++i) x[i] = u(rng);
  return x;
}

double max_relative_gradient_error(const Objective& f, const Vector& x, double h) {
  const Vector an = f.evaluate(x).gradient;
  const Vector fd = finite_diff_gradient(f, x, h);
  return (an - fd).norm() / std::max(1.0, an.norm());
}

}  // namespace

TEST_CASE("bump anchor values") {
  CHECK(std::abs(upsilon(1.0)) <= 1e-12);
  CHECK(upsilon_prime(1.0) == 0.0);
  CHECK(upsilon_prime(0.0) == 0.0);
  const double u0 = upsilon_quadrature(0.0);
  CHECK(u0 == doctest::Approx(7.3411).epsilon(1e-4));
  CHECK(upsilon(0.0) == doctest::Approx(u0).epsilon(1e-12));
  CHECK(upsilon(0.0) >= 5.0);
  CHECK(upsilon(0.0) <= 10.0);
}

TEST_CASE("closed-form bump agrees with quadrature on a fine grid") {
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double t = -3.0 + 6.0 * i / 9999.0;
    worst = std::max(worst, std::abs(upsilon(t) - upsilon_quadrature(t)));
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("bump curvature is bounded by 180") {
  double worst = 0.0;
  for (int i = 0; i <= 200000; ++i) {
    const double t = -10.0 + 20.0 * i / 200000.0;
    worst = std::max(worst, std::abs(upsilon_second(t)));
  }
  CHECK(worst <= 180.0);
  for (double t : {-2.0, -0.3, 0.4, 1.7}) {
    const double h = 1e-6;
    const double fd = (upsilon_prime(t + h) - upsilon_prime(t - h)) / (2.0 * h);
    CHECK(upsilon_second(t) == doctest::Approx(fd).epsilon(1e-7));
  }
}

TEST_CASE("bump growth inequality at selected points") {
  for (double t : {-5.0, -0.1, 0.1, 0.5, 0.9, 2.0}) {
    CHECK(40.0 * (t - 1.0) * upsilon_prime(t) >= upsilon(t));
  }
}

TEST_CASE("chain quadratic") {
  const Evaluation at_one = q_value_grad(Vector::Ones(7));
  CHECK(at_one.value == 0.0);
  CHECK(at_one.gradient.isZero(0.0));

  const Evaluation e = q_value_grad(Vector::Zero(2));
  CHECK(e.value == 0.25);
  CHECK(e.gradient == Vector{{-0.5, 0.0}});

  const Evaluation single = q_value_grad(Vector::Constant(1, 3.0));
  CHECK(single.value == 1.0);
  CHECK(single.gradient[0] == 1.0);

  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector x = uniform_vector(40, rng);
    const Evaluation r = q_value_grad(x);
    const double half_inner = 0.5 * r.gradient.dot(x - Vector::Ones(40));
    CHECK(std::abs(r.value - half_inner) <= 1e-12 * std::abs(r.value));
  }
  CHECK_THROWS_AS(q_value_grad(Vector(0)), ConfigError);
}

TEST_CASE("chain objective basics") {
  const auto inst = HardInstanceUnscaled::make(1000, 1e-6);
  const auto f = inst.objective();
  CHECK(std::abs(f->evaluate(Vector::Ones(1000)).value) <= 1e-14);
  CHECK(*inst.declared_gamma() == doctest::Approx(1.0 / (100.0 * 1000.0 * 1e-3)));

  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    Vector x = uniform_vector(1000, rng);
    x.tail(1000 - 500).setZero();  // x_t = 0 for t >= ceil(T/2), 1-based
    CHECK(f->evaluate(x).value >= 2.0 * 1000.0 * 1e-6);
  }
}

TEST_CASE("chain objective is a first-order zero-chain") {
  ChainObjective f(60, 1e-6);
  std::mt19937_64 rng(3);
  for (Index t = 0; t <= 60; ++t) {
    Vector x = uniform_vector(60, rng);
    x.tail(60 - t).setZero();
    const Vector g = f.evaluate(x).gradient;
    for (Index i = t + 1; i < 60; ++i) REQUIRE(g[i] == 0.0);
  }
}

TEST_CASE("analytic gradients match finite differences") {
  std::mt19937_64 rng(4);
  ChainObjective chain(50, 1e-6);
  const auto scaled = HardInstanceScaled::make(1.0, 1.0, 0.01, 1e-6);
  const auto fhat = scaled.objective();
  const double s = 1.0 / std::sqrt(static_cast<double>(scaled.T));
  for (int trial = 0; trial < 100; ++trial) {
    CHECK(max_relative_gradient_error(chain, uniform_vector(50, rng), 1e-6) <= 1e-5);
  }
  for (int trial = 0; trial < 5; ++trial) {
    const Vector x = s * uniform_vector(scaled.T, rng);
    CHECK(max_relative_gradient_error(*fhat, x, 1e-6 * s) <= 1e-5);
  }
}

TEST_CASE("chain objective smoothness bound") {
  // The chain quadratic alone has curvature approaching 2 for long chains;
  // together with the bump term fbar is (2 + 180 sigma)-smooth.
  const auto inst = HardInstanceUnscaled::make(1000, 1e-6);
  const auto f = inst.objective();
  std::mt19937_64 rng(5);
  double worst = 0.0;
  for (int trial = 0; trial < 2000; ++trial) {
    const Vector x = uniform_vector(1000, rng);
    const Vector y = uniform_vector(1000, rng);
    worst = std::max(worst, (f->evaluate(x).gradient - f->evaluate(y).gradient).norm() /
                                (x - y).norm());
  }
  CHECK(worst <= inst.smoothness_bound());

  // Alternating direction: Rayleigh quotient of the chain Hessian near 2.
  Vector d(1000);
  for (Index i = 0; i < 1000; ++i) d[i] = (i % 2 == 0) ? 1.0 : -1.0;
  const double rq = q_value_grad(Vector::Ones(1000) + d).gradient.dot(d) / d.squaredNorm();
  CHECK(rq > 1.99);
  CHECK(rq <= 2.0);
}

TEST_CASE("scaled instance") {
  const auto inst = HardInstanceScaled::make(1.0, 1.0, 0.01, 1e-6);
  CHECK(inst.T == 1000);
  CHECK(inst.sigma == doctest::Approx(1e-6));
  CHECK(inst.optimum().x_star.norm() == doctest::Approx(1.0).epsilon(1e-14));
  const auto f = inst.objective();
  CHECK(std::abs(f->evaluate(inst.optimum().x_star).value) <= 1e-14);

  const auto wide = HardInstanceScaled::make(4.0, 3.0, 0.005, 1e-5);
  CHECK(wide.optimum().x_star.norm() == doctest::Approx(3.0).epsilon(1e-14));

  std::mt19937_64 rng(6);
  const double c = 1.0 / std::sqrt(1000.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::uniform_int_distribution<Index> pick(500, 1000);
    const Index t = pick(rng);
    Vector x = c * uniform_vector(1000, rng);
    x.tail(1000 - t).setZero();
    if (t == 1000) x[999] = 0.0;
    CHECK(f->evaluate(x).value > 1e-6);
  }
}

TEST_CASE("instance preconditions") {
  CHECK_THROWS_AS(HardInstanceUnscaled::make(1000, 2e-6), ConfigError);
  CHECK_THROWS_AS(HardInstanceUnscaled::make(999, 1e-6), ConfigError);
  CHECK_NOTHROW(HardInstanceUnscaled::make(1000, 1e-6));
  CHECK_FALSE(HardInstanceUnscaled::unchecked(1, 0.5).declared_gamma().has_value());
  CHECK(HardInstanceUnscaled::unchecked(1, 0.5).objective()->evaluate(Vector::Ones(1)).value ==
        doctest::Approx(0.0).scale(1e-14));

  CHECK_THROWS_AS(HardInstanceScaled::make(1.0, 1.0, 0.02, 1e-6), ConfigError);
  CHECK_THROWS_AS(HardInstanceScaled::make(1.0, 1.0, 0.01, 1e-5), ConfigError);
  CHECK_FALSE(HardInstanceScaled::unchecked(1.0, 1.0, 0.5, 1e-2).declared_gamma().has_value());
  CHECK_THROWS_AS(make_problem(HardInstanceScaled::unchecked(1.0, 1.0, 0.5, 1e-2),
                               SmoothnessConvention::kNominal),
                  ConfigError);

  const auto p = make_problem(HardInstanceScaled::make(1.0, 1.0, 0.01, 1e-6),
                              SmoothnessConvention::kRigorous);
  CHECK(p.L == doctest::Approx(2.0 + 180e-6));
  CHECK(p.gamma == 0.01);
}

TEST_CASE("quadratic family") {
  const Vector id = make_spectrum(4, 1.0, 1.0, Spectrum::kLinear);
  CHECK(id == Vector::Ones(4));
  QuadraticObjective f(id, Vector::Zero(4));
  const Vector x{{1.0, 2.0, 0.0, -2.0}};
  CHECK(f.evaluate(x).value == 4.5);

  const Vector d = make_spectrum(50, 1e-4, 1.0, Spectrum::kLog);
  CHECK(d.maxCoeff() / d.minCoeff() == doctest::Approx(1e4));
  for (Index i = 1; i < 50; ++i) CHECK(d[i] > d[i - 1]);
  CHECK(make_spectrum(1, 0.1, 2.0, Spectrum::kLog)[0] == 2.0);

  // Strong convexity implies the gamma = 1 strong quasar inequality.
  const Vector xs = random_point(50, 3);
  const auto p = make_quadratic_problem(d, xs, 1e-4, 1.0);
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const Vector y = uniform_vector(50, rng);
    const Evaluation e = p.objective->evaluate(y);
    const double rhs = e.value + e.gradient.dot(xs - y) + 0.5e-4 * (xs - y).squaredNorm();
    CHECK(0.0 >= rhs - 1e-12 * std::max(1.0, e.value));
  }
  CHECK(parse_spectrum("log") == Spectrum::kLog);
  CHECK_FALSE(parse_spectrum("cubic").has_value());
  CHECK(random_point(5, 11) == random_point(5, 11));
}

TEST_CASE("affine rescaling") {
  auto base = std::make_shared<QuadraticObjective>(Vector::Ones(2), Vector::Zero(2));
  AffineScaledObjective g(base, 2.0, 3.0);
  const Evaluation e = g.evaluate(Vector{{1.0, 1.0}});
  CHECK(e.value == 2.0 * 0.5 * 18.0);
  CHECK(e.gradient == Vector{{18.0, 18.0}});
  CHECK_THROWS_AS(AffineScaledObjective(base, -1.0, 1.0), ConfigError);
}
