#include "qcagd/instances.hpp"
#include "qcagd/solvers.hpp"
#include "qcagd/verify.hpp"

#include <doctest.h>

#include <cmath>

using namespace qcagd;

namespace {

std::shared_ptr<const Objective> half_sq(Index n) {
  return std::make_shared<QuadraticObjective>(Vector::Ones(n), Vector::Zero(n));
}

SamplerSpec spec(std::int64_t count, std::uint64_t seed, double scale = 1.0,
                 double transition = 0.0) {
  SamplerSpec s;
  s.count = count;
  s.seed = seed;
  s.scale = scale;
  s.transition_fraction = transition;
  return s;
}

}  // namespace

TEST_CASE("sampler is seeded and covers the box") {
  const auto a = draw_samples(5, spec(200, 9));
  const auto b = draw_samples(5, spec(200, 9));
  REQUIRE(a.size() == 200);
  double lo = 1e9, hi = -1e9;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i] == b[i]);
    lo = std::min(lo, a[i].minCoeff());
    hi = std::max(hi, a[i].maxCoeff());
  }
  CHECK(lo >= -2.0);
  CHECK(hi <= 3.0);
  CHECK(lo < -1.5);
  CHECK(hi > 2.5);
}

TEST_CASE("transition patterns have a high head and a low tail") {
  const auto xs = draw_samples(40, spec(100, 3, 1.0, 1.0));
  for (const Vector& x : xs) {
    CHECK(x[0] >= 0.9);
    CHECK(x[39] <= 0.9);
  }
}

TEST_CASE("nonzero prefix") {
  CHECK(nonzero_prefix(Vector::Zero(4)) == 0);
  CHECK(nonzero_prefix(Vector{{1.0, 0.0, 2.0, 0.0}}) == 3);
  CHECK(nonzero_prefix(Vector{{1.0, 1e-15}}) == 1);
}

TEST_CASE("gamma of convex quadratics is one") {
  const auto f = half_sq(3);
  const auto xs = draw_samples(3, spec(500, 1));
  const auto cert = estimate_gamma(*f, Vector::Zero(3), 0.0, xs, 1);
  CHECK(cert.valid);
  CHECK(cert.gamma_hat == 1.0);
  CHECK(cert.sample_count == 500);
  CHECK(cert.seed == 1);

  // One-dimensional half square with mu = 1 holds with equality at gamma = 1.
  const auto g = half_sq(1);
  const auto cert1 = estimate_gamma(*g, Vector::Zero(1), 1.0, draw_samples(1, spec(200, 2)));
  CHECK(cert1.gamma_hat == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("gamma of the chain objective meets its declared value") {
  const auto inst = HardInstanceUnscaled::make(1000, 1e-6);
  const auto f = inst.objective();
  const auto xs = draw_samples(1000, spec(3000, 42, 1.0, 0.5));
  const auto cert = estimate_gamma(*f, inst.optimum().x_star, 0.0, xs, 42);
  CHECK(cert.valid);
  CHECK(cert.gamma_hat >= *inst.declared_gamma());
  const auto again = estimate_gamma(*f, inst.optimum().x_star, 0.0, xs, 42);
  CHECK(again.gamma_hat == cert.gamma_hat);
}

TEST_CASE("gamma estimate is monotone in the sample set") {
  ScalarObjective f([](double x) { return x * x + 3.0 * std::sin(x) * std::sin(x); },
                    [](double x) { return 2.0 * x + 3.0 * std::sin(2.0 * x); });
  const auto xs = draw_samples(1, spec(400, 5));
  const std::vector<Vector> half(xs.begin(), xs.begin() + 200);
  const double g_half = estimate_gamma(f, Vector::Zero(1), 0.0, half).gamma_hat;
  const double g_all = estimate_gamma(f, Vector::Zero(1), 0.0, xs).gamma_hat;
  CHECK(g_all <= g_half);
  CHECK(g_all < 1.0);
  CHECK(g_all > 0.0);
}

TEST_CASE("a non-minimizer reference point aborts the estimate") {
  const auto f = half_sq(2);
  CHECK_THROWS_AS(estimate_gamma(*f, Vector::Constant(2, 1.0), 0.0,
                                 draw_samples(2, spec(50, 3))),
                  std::runtime_error);
}

TEST_CASE("a stationary non-minimizer invalidates the certificate") {
  // Upsilon has a flat point at 0 that is not its minimizer.
  ScalarObjective f(upsilon, upsilon_prime);
  const std::vector<Vector> xs = {Vector::Constant(1, 0.0), Vector::Constant(1, 2.0)};
  const auto cert = estimate_gamma(f, Vector::Constant(1, 1.0), 0.0, xs);
  CHECK_FALSE(cert.valid);
  CHECK(cert.gamma_hat == 0.0);
  REQUIRE_FALSE(cert.witnesses.empty());
  CHECK(cert.witnesses.front().sample == 0);
}

TEST_CASE("gradient and chord forms agree") {
  const auto t_grid = std::vector<double>{0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0};
  SUBCASE("convex quadratic") {
    const auto p = make_quadratic_problem(make_spectrum(6, 0.1, 1.0, Spectrum::kLog),
                                          random_point(6, 1), 0.1, 1.0);
    const auto xs = draw_samples(6, spec(300, 2));
    for (double mu : {0.0, 0.1}) {
      const auto r =
          check_gradient_chord_equivalence(*p.objective, p.optimum->x_star, 1.0, mu, xs, t_grid);
      CHECK(r.agree);
      CHECK(r.differential_violations == 0);
      CHECK(r.chord_violations == 0);
      CHECK(r.corollary_violations == 0);
    }
  }
  SUBCASE("chain objective at its declared gamma") {
    const auto inst = HardInstanceUnscaled::make(1000, 1e-6);
    const auto f = inst.objective();
    const auto xs = draw_samples(1000, spec(300, 3, 1.0, 0.5));
    const auto r = check_gradient_chord_equivalence(*f, inst.optimum().x_star,
                                                    *inst.declared_gamma(), 0.0, xs, t_grid);
    CHECK(r.agree);
    CHECK(r.differential_violations == 0);
    CHECK(r.chord_violations == 0);
  }
  SUBCASE("over-declared gamma fails in both forms") {
    ScalarObjective f([](double x) { return x * x + 3.0 * std::sin(x) * std::sin(x); },
                      [](double x) { return 2.0 * x + 3.0 * std::sin(2.0 * x); });
    const auto xs = draw_samples(1, spec(400, 5));
    const auto r = check_gradient_chord_equivalence(f, Vector::Zero(1), 1.0, 0.0, xs, t_grid);
    CHECK(r.differential_violations > 0);
    CHECK(r.chord_violations > 0);
    CHECK(r.agree);
    CHECK_FALSE(r.witnesses.empty());
  }
}

TEST_CASE("structural observations") {
  const auto f = half_sq(1);
  const auto xs = draw_samples(1, spec(300, 7));

  const auto sc = check_scaling_invariance(f, Vector::Zero(1), 2.0, 3.0, xs);
  CHECK(sc.gamma_original == 1.0);
  CHECK(sc.gamma_scaled == 1.0);
  CHECK(sc.equal);

  const auto inst = HardInstanceUnscaled::make(1000, 1e-6);
  const auto chain_samples = draw_samples(1000, spec(300, 8, 1.0, 0.5));
  const auto sc2 = check_scaling_invariance(inst.objective(), inst.optimum().x_star, 0.5,
                                            -2.0, chain_samples);
  CHECK(sc2.equal);

  const auto tr = check_tradeoff(*f, Vector::Zero(1), 1.0, 1.0, 0.5, xs);
  CHECK(tr.violations_original == 0);
  CHECK(tr.violations_traded == 0);
  CHECK(tr.implied);
  CHECK_THROWS_AS(check_tradeoff(*f, Vector::Zero(1), 1.0, 1.0, 1.5, xs), ConfigError);
}

TEST_CASE("one-dimensional unimodality along axes of the chain objective") {
  const auto inst = HardInstanceUnscaled::make(1000, 1e-6);
  const auto f = inst.objective();
  for (Index i : {0, 1, 499, 999}) {
    Vector d = Vector::Zero(1000);
    d[i] = 1.0;
    const auto r = check_unimodal_line(*f, inst.optimum().x_star, d, 3.0, 601);
    CHECK(r.violations == 0);
    CHECK(r.grid_points == 600);
  }
  ScalarObjective bumpy([](double x) { return x * x * x * x - 2.0 * x * x + 0.5 * x; },
                        [](double x) { return 4.0 * x * x * x - 4.0 * x + 0.5; });
  // Global minimizer of the tilted double well lies near -1.06.
  const auto r = check_unimodal_line(bumpy, Vector::Constant(1, -1.0574), Vector::Ones(1),
                                     3.0, 301);
  CHECK(r.violations > 0);
}

TEST_CASE("smoothness estimates") {
  const auto f = half_sq(4);
  const auto r = smoothness_estimate(*f, spec(500, 1), 1.0);
  CHECK(r.L_hat == 1.0);
  CHECK(r.descent_violations == 0);
  CHECK(r.pairs == 999);

  const auto inst = HardInstanceUnscaled::make(1000, 1e-6);
  const auto rc = smoothness_estimate(*inst.objective(), spec(300, 2, 1.0, 0.5),
                                      inst.smoothness_bound());
  CHECK(rc.L_hat <= inst.smoothness_bound());
  CHECK(rc.descent_violations == 0);
}

TEST_CASE("zero-chain detection") {
  const auto inst = HardInstanceUnscaled::make(1000, 1e-6);
  auto xs = draw_samples(1000, spec(50, 4));
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i].tail(1000 - 20 * i).setZero();
  CHECK(zero_chain_violations(*inst.objective(), xs) == 0);

  QuadraticObjective dense(Vector::Ones(1000), Vector::Ones(1000));
  CHECK(zero_chain_violations(dense, xs) > 0);
}

TEST_CASE("prefix analysis of a synthetic call log") {
  std::vector<PrefixCall> calls = {{0, 1, 0}, {1, 2, 0}, {2, 2, 0}, {2, 3, 0}};
  auto t = analyse_prefix_calls(calls);
  CHECK(t.zero_respecting);
  CHECK(t.max_jump == 1);
  calls.push_back({5, 6, 0});
  t = analyse_prefix_calls(calls);
  CHECK_FALSE(t.zero_respecting);
  CHECK(t.first_violation == 4);
  CHECK(t.max_jump == 3);
}

TEST_CASE("library solvers are zero-respecting on chains") {
  const auto inst = HardInstanceUnscaled::unchecked(80, 1e-4);
  const auto p = make_problem(inst, SmoothnessConvention::kRigorous, 0.01);
  SolveOptions o;
  o.iterations = 60;
  o.epsilon = 1e-3;
  o.store_iterates = false;

  const auto gd = run_with_prefix_instrumentation(
      [&](const QuasarProblem& q, const Vector& x0) { return solve_gd(q, x0, o); }, p);
  CHECK(gd.zero_respecting);
  CHECK(gd.max_jump <= 1);
  CHECK(static_cast<std::int64_t>(gd.calls.size()) ==
        gd.solver_trace.records.back().cumulative_grad_evals);

  const auto agd = run_with_prefix_instrumentation(
      [&](const QuasarProblem& q, const Vector& x0) { return solve_nonstrong_qc(q, x0, o); },
      p);
  CHECK(agd.zero_respecting);
  CHECK(agd.max_jump <= 1);

  QuasarProblem strong = p;
  strong.mu = 1e-3;
  const auto sagd = run_with_prefix_instrumentation(
      [&](const QuasarProblem& q, const Vector& x0) { return solve_strongly_qc(q, x0, o); },
      strong);
  CHECK(sagd.zero_respecting);
  CHECK(sagd.max_jump <= 1);
}

TEST_CASE("a dense method is flagged") {
  const auto inst = HardInstanceUnscaled::unchecked(50, 1e-4);
  const auto p = make_problem(inst, SmoothnessConvention::kRigorous, 0.01);
  SolveOptions o;
  o.iterations = 5;
  const auto t = run_with_prefix_instrumentation(
      [&](const QuasarProblem& q, const Vector& x0) {
        return solve_gd(q, x0 + Vector::Constant(x0.size(), 0.1), o);
      },
      p);
  CHECK_FALSE(t.zero_respecting);
  CHECK(t.first_violation == 0);
  CHECK(t.max_jump > 1);
}
