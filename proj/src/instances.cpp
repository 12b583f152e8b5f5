#include "qcagd/instances.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace qcagd {

namespace {

double antiderivative(double t) {
  return 0.5 * t * t - t + std::atan(t) - 0.5 * std::log1p(t * t);
}

const double kAntiderivativeAtOne =
    -0.5 + std::numbers::pi / 4.0 - 0.5 * std::numbers::ln2;

// Integer parameters derived from real formulas are rounded with a relative
// tolerance so that values like 1000.0000000000001 map to 1000.
std::int64_t ceil_tolerant(double z) {
  return static_cast<std::int64_t>(std::ceil(z * (1.0 - 1e-12)));
}

}  // namespace

double upsilon(double theta) {
  return 120.0 * (antiderivative(theta) - kAntiderivativeAtOne);
}

double upsilon_prime(double theta) {
  const double t2 = theta * theta;
  return 120.0 * t2 * (theta - 1.0) / (1.0 + t2);
}

double upsilon_second(double theta) {
  const double t2 = theta * theta;
  const double den = 1.0 + t2;
  return 120.0 * theta * (t2 * theta + 3.0 * theta - 2.0) / (den * den);
}

Evaluation q_value_grad(const Vector& x) {
  const Index T = x.size();
  if (T < 1) throw ConfigError("q needs dimension >= 1");
  Evaluation e;
  e.gradient.setZero(T);
  const double head = x[0] - 1.0;
  e.value = 0.25 * head * head;
  e.gradient[0] = 0.5 * head;
  for (Index i = 0; i + 1 < T; ++i) {
    const double d = x[i] - x[i + 1];
    e.value += 0.25 * d * d;
    e.gradient[i] += 0.5 * d;
    e.gradient[i + 1] -= 0.5 * d;
  }
  return e;
}

// ---------------------------------------------------------------------------

ChainObjective::ChainObjective(std::int64_t T, double sigma)
    : T_(T), sigma_(sigma) {
  if (T < 1) throw ConfigError("chain length T must be >= 1");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ConfigError("sigma must be > 0");
  }
}

Evaluation ChainObjective::evaluate(const Vector& x) const {
  Evaluation e = q_value_grad(x);
  double bumps = 0.0;
  for (Index i = 0; i < x.size(); ++i) {
    bumps += upsilon(x[i]);
    e.gradient[i] += sigma_ * upsilon_prime(x[i]);
  }
  e.value += sigma_ * bumps;
  return e;
}

ScaledChainObjective::ScaledChainObjective(std::int64_t T, double sigma,
                                           double L, double R)
    : chain_(T, sigma),
      value_scale_(L * R * R / static_cast<double>(T)),
      argument_scale_(std::sqrt(static_cast<double>(T)) / R) {
  if (!(L > 0.0) || !(R > 0.0)) throw ConfigError("L and R must be > 0");
}

Evaluation ScaledChainObjective::evaluate(const Vector& x) const {
  Evaluation e = chain_.evaluate(argument_scale_ * x);
  e.value *= value_scale_;
  e.gradient *= value_scale_ * argument_scale_;
  return e;
}

// ---------------------------------------------------------------------------

HardInstanceUnscaled HardInstanceUnscaled::make(std::int64_t T, double sigma) {
  if (!(sigma > 0.0 && sigma <= 1e-6)) {
    throw ConfigError("sigma must lie in (0, 1e-6]");
  }
  if (static_cast<double>(T) < (1.0 - 1e-12) / std::sqrt(sigma)) {
    throw ConfigError("T must be >= sigma^(-1/2)");
  }
  return {T, sigma, true};
}

HardInstanceUnscaled HardInstanceUnscaled::unchecked(std::int64_t T,
                                                     double sigma) {
  if (T < 1) throw ConfigError("chain length T must be >= 1");
  if (!(sigma > 0.0)) throw ConfigError("sigma must be > 0");
  return {T, sigma, false};
}

std::optional<double> HardInstanceUnscaled::declared_gamma() const {
  if (!checked) return std::nullopt;
  return 1.0 / (100.0 * static_cast<double>(T) * std::sqrt(sigma));
}

std::shared_ptr<const ChainObjective> HardInstanceUnscaled::objective() const {
  return std::make_shared<ChainObjective>(T, sigma);
}

KnownOptimum HardInstanceUnscaled::optimum() const {
  return {Vector::Ones(static_cast<Index>(T)), 0.0};
}

namespace {

HardInstanceScaled derive_scaled(double L, double R, double gamma, double eps,
                                 bool checked) {
  if (!(L > 0.0) || !(R > 0.0) || !(eps > 0.0) || !(gamma > 0.0)) {
    throw ConfigError("L, R, gamma and eps must be > 0");
  }
  HardInstanceScaled inst;
  inst.L = L;
  inst.R = R;
  inst.gamma = gamma;
  inst.eps = eps;
  inst.checked = checked;
  inst.T = std::max<std::int64_t>(
      1, ceil_tolerant(1e-2 / gamma * std::sqrt(L) * R / std::sqrt(eps)));
  const double T = static_cast<double>(inst.T);
  inst.sigma = 1.0 / (1e4 * T * T * gamma * gamma);
  return inst;
}

}  // namespace

HardInstanceScaled HardInstanceScaled::make(double L, double R, double gamma,
                                            double eps) {
  if (!(gamma > 0.0 && gamma <= 1e-2)) {
    throw ConfigError("gamma must lie in (0, 1e-2]");
  }
  if (!(eps > 0.0) ||
      std::sqrt(L) * R / std::sqrt(eps) < 1e3 * (1.0 - 1e-12)) {
    throw ConfigError("hard instance needs L^(1/2) R eps^(-1/2) >= 1e3");
  }
  return derive_scaled(L, R, gamma, eps, true);
}

HardInstanceScaled HardInstanceScaled::unchecked(double L, double R,
                                                 double gamma, double eps) {
  return derive_scaled(L, R, gamma, eps, false);
}

std::optional<double> HardInstanceScaled::declared_gamma() const {
  if (!checked) return std::nullopt;
  return gamma;
}

std::shared_ptr<const ScaledChainObjective> HardInstanceScaled::objective()
    const {
  return std::make_shared<ScaledChainObjective>(T, sigma, L, R);
}

KnownOptimum HardInstanceScaled::optimum() const {
  const double c = R / std::sqrt(static_cast<double>(T));
  return {Vector::Constant(static_cast<Index>(T), c), 0.0};
}

HardInstanceUnscaled HardInstanceScaled::unscaled() const {
  return {T, sigma, checked};
}

QuasarProblem make_problem(const HardInstanceUnscaled& inst,
                           SmoothnessConvention smoothness,
                           std::optional<double> gamma) {
  QuasarProblem p;
  p.objective = inst.objective();
  p.L = smoothness == SmoothnessConvention::kNominal ? inst.nominal_smoothness()
                                                     : inst.smoothness_bound();
  const auto g = gamma ? gamma : inst.declared_gamma();
  if (!g) throw ConfigError("unchecked hard instance needs an explicit gamma");
  p.gamma = *g;
  p.mu = 0.0;
  p.R = std::sqrt(static_cast<double>(inst.T));
  p.optimum = inst.optimum();
  p.validate();
  return p;
}

QuasarProblem make_problem(const HardInstanceScaled& inst,
                           SmoothnessConvention smoothness,
                           std::optional<double> gamma) {
  QuasarProblem p;
  p.objective = inst.objective();
  p.L = smoothness == SmoothnessConvention::kNominal ? inst.nominal_smoothness()
                                                     : inst.smoothness_bound();
  const auto g = gamma ? gamma : inst.declared_gamma();
  if (!g) throw ConfigError("unchecked hard instance needs an explicit gamma");
  p.gamma = *g;
  p.mu = 0.0;
  p.R = inst.R;
  p.optimum = inst.optimum();
  p.validate();
  return p;
}

// ---------------------------------------------------------------------------

QuadraticObjective::QuadraticObjective(Vector diagonal, Vector x_star)
    : diagonal_(std::move(diagonal)), x_star_(std::move(x_star)) {
  if (diagonal_.size() != x_star_.size() || diagonal_.size() < 1) {
    throw ConfigError("quadratic needs matching non-empty diagonal and x*");
  }
}

Evaluation QuadraticObjective::evaluate(const Vector& x) const {
  const Vector d = x - x_star_;
  Evaluation e;
  e.gradient = diagonal_.cwiseProduct(d);
  e.value = 0.5 * d.dot(e.gradient);
  return e;
}

std::optional<Spectrum> parse_spectrum(const std::string& name) {
  if (name == "log") return Spectrum::kLog;
  if (name == "linear") return Spectrum::kLinear;
  return std::nullopt;
}

std::string to_string(Spectrum spectrum) {
  return spectrum == Spectrum::kLog ? "log" : "linear";
}

Vector make_spectrum(Index n, double mu, double L, Spectrum spacing) {
  if (n < 1) throw ConfigError("spectrum needs n >= 1");
  if (!(mu > 0.0) || !(L >= mu)) {
    throw ConfigError("spectrum needs 0 < mu <= L");
  }
  Vector d(n);
  if (n == 1) {
    d[0] = L;
    return d;
  }
  for (Index i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n - 1);
    d[i] = spacing == Spectrum::kLog ? mu * std::pow(L / mu, t)
                                     : mu + (L - mu) * t;
  }
  // Pin the endpoints exactly so the declared constants are tight.
  d[0] = mu;
  d[n - 1] = L;
  return d;
}

Vector random_point(Index n, std::uint64_t seed, double lo, double hi) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  Vector x(n);
  for (Index i = 0; i < n; ++i) x[i] = dist(rng);
  return x;
}

QuasarProblem make_quadratic_problem(const Vector& diagonal,
                                     const Vector& x_star, double mu,
                                     double L) {
  QuasarProblem p;
  p.objective = std::make_shared<QuadraticObjective>(diagonal, x_star);
  p.L = L;
  p.gamma = 1.0;
  p.mu = mu;
  p.optimum = KnownOptimum{x_star, 0.0};
  p.validate();
  return p;
}

AffineScaledObjective::AffineScaledObjective(
    std::shared_ptr<const Objective> base, double a, double b)
    : base_(std::move(base)), a_(a), b_(b) {
  if (!(a > 0.0) || b == 0.0) throw ConfigError("need a > 0 and b != 0");
}

Evaluation AffineScaledObjective::evaluate(const Vector& x) const {
  Evaluation e = base_->evaluate(b_ * x);
  e.value *= a_;
  e.gradient *= a_ * b_;
  return e;
}

Evaluation ScalarObjective::evaluate(const Vector& x) const {
  return {value_(x[0]), Vector::Constant(1, deriv_(x[0]))};
}

}  // namespace qcagd
