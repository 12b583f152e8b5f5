#pragma once

// Test objectives: the zero-chain hard instance used for lower bounds and a
// family of diagonal quadratics.
//
// The hard instance is
//
//   fbar(x) = q(x) + sigma * sum_i Upsilon(x_i),
//   q(x)    = 1/4 (x_1 - 1)^2 + 1/4 sum_{i<T} (x_i - x_{i+1})^2,
//   Upsilon(theta) = 120 int_1^theta t^2 (t - 1) / (1 + t^2) dt,
//
// minimized at the all-ones vector with value 0, and its rescaling
//
//   fhat(x) = L R^2 / T * fbar(x sqrt(T) / R).

#include "qcagd/core.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>

namespace qcagd {

/// Upsilon(theta) via the antiderivative
/// F(t) = t^2/2 - t + atan(t) - ln(1 + t^2)/2, Upsilon = 120 (F(theta) - F(1)).
double upsilon(double theta);
/// 120 theta^2 (theta - 1) / (1 + theta^2).
double upsilon_prime(double theta);
/// 120 theta (theta^3 + 3 theta - 2) / (1 + theta^2)^2.
double upsilon_second(double theta);

/// Value and gradient of the chain quadratic q on R^T (T = x.size() >= 1).
Evaluation q_value_grad(const Vector& x);

/// fbar with chain length T and weight sigma.
class ChainObjective final : public Objective {
 public:
  ChainObjective(std::int64_t T, double sigma);
  Index dimension() const override { return static_cast<Index>(T_); }
  Evaluation evaluate(const Vector& x) const override;

  std::int64_t T() const { return T_; }
  double sigma() const { return sigma_; }

 private:
  std::int64_t T_;
  double sigma_;
};

/// fhat = scale_value * fbar(scale_arg * x) with scale_value = L R^2 / T and
/// scale_arg = sqrt(T) / R.
class ScaledChainObjective final : public Objective {
 public:
  ScaledChainObjective(std::int64_t T, double sigma, double L, double R);
  Index dimension() const override { return chain_.dimension(); }
  Evaluation evaluate(const Vector& x) const override;

  const ChainObjective& chain() const { return chain_; }
  double value_scale() const { return value_scale_; }
  double argument_scale() const { return argument_scale_; }

 private:
  ChainObjective chain_;
  double value_scale_;
  double argument_scale_;
};

/// Parameters (T, sigma) of fbar.
///
/// The checked constructor enforces sigma in (0, 1e-6] and T >= sigma^(-1/2),
/// under which fbar is 1/(100 T sqrt(sigma))-quasar-convex. The unchecked one
/// accepts any T >= 1, sigma > 0 and carries no gamma.
struct HardInstanceUnscaled {
  std::int64_t T = 1;
  double sigma = 1e-6;
  bool checked = true;

  static HardInstanceUnscaled make(std::int64_t T, double sigma);
  static HardInstanceUnscaled unchecked(std::int64_t T, double sigma);

  /// 1/(100 T sqrt(sigma)) when the construction was checked.
  std::optional<double> declared_gamma() const;
  /// Smoothness constant fbar is advertised with.
  double nominal_smoothness() const { return 1.0; }
  /// A provable smoothness constant: ||Hess q|| <= 2 and |Upsilon''| <= 180.
  double smoothness_bound() const { return 2.0 + 180.0 * sigma; }

  std::shared_ptr<const ChainObjective> objective() const;
  KnownOptimum optimum() const;
};

/// Parameters (L, R, gamma, eps) of fhat with derived
/// T = ceil(1e-2 gamma^-1 L^(1/2) R eps^(-1/2)) and
/// sigma = 1 / (1e4 T^2 gamma^2).
struct HardInstanceScaled {
  double L = 1.0;
  double R = 1.0;
  double gamma = 1e-2;
  double eps = 1e-6;
  std::int64_t T = 1;
  double sigma = 1e-6;
  bool checked = true;

  /// Enforces gamma in (0, 1e-2] and L^(1/2) R eps^(-1/2) >= 1e3.
  static HardInstanceScaled make(double L, double R, double gamma, double eps);
  static HardInstanceScaled unchecked(double L, double R, double gamma,
                                      double eps);

  std::optional<double> declared_gamma() const;
  double nominal_smoothness() const { return L; }
  double smoothness_bound() const { return L * (2.0 + 180.0 * sigma); }

  std::shared_ptr<const ScaledChainObjective> objective() const;
  /// x* = (R / sqrt(T)) 1, f* = 0.
  KnownOptimum optimum() const;
  HardInstanceUnscaled unscaled() const;
};

/// Which smoothness constant a hard-instance problem declares.
enum class SmoothnessConvention {
  kNominal,   // the advertised constant (1 for fbar, L for fhat)
  kRigorous,  // the provable bound (2 + 180 sigma) times the nominal one
};

/// Problem views of the hard instances. The unchecked variants need an
/// explicit gamma.
QuasarProblem make_problem(const HardInstanceUnscaled& inst,
                           SmoothnessConvention smoothness,
                           std::optional<double> gamma = std::nullopt);
QuasarProblem make_problem(const HardInstanceScaled& inst,
                           SmoothnessConvention smoothness,
                           std::optional<double> gamma = std::nullopt);

/// f(x) = 1/2 (x - x*)^T diag(d) (x - x*).
class QuadraticObjective final : public Objective {
 public:
  QuadraticObjective(Vector diagonal, Vector x_star);
  Index dimension() const override { return diagonal_.size(); }
  Evaluation evaluate(const Vector& x) const override;

  const Vector& diagonal() const { return diagonal_; }
  const Vector& x_star() const { return x_star_; }

 private:
  Vector diagonal_;
  Vector x_star_;
};

enum class Spectrum { kLog, kLinear };

std::optional<Spectrum> parse_spectrum(const std::string& name);
std::string to_string(Spectrum spectrum);

/// n eigenvalues spanning [mu, L], log- or linearly spaced (n = 1 gives L).
Vector make_spectrum(Index n, double mu, double L, Spectrum spacing);

/// Deterministic x* with entries uniform on [-1, 1].
Vector random_point(Index n, std::uint64_t seed, double lo = -1.0,
                    double hi = 1.0);

/// Quadratic problem declared with (L, gamma = 1, mu).
QuasarProblem make_quadratic_problem(const Vector& diagonal,
                                     const Vector& x_star, double mu,
                                     double L);

/// a * f(b * x) for a > 0, b != 0.
class AffineScaledObjective final : public Objective {
 public:
  AffineScaledObjective(std::shared_ptr<const Objective> base, double a,
                        double b);
  Index dimension() const override { return base_->dimension(); }
  Evaluation evaluate(const Vector& x) const override;

 private:
  std::shared_ptr<const Objective> base_;
  double a_;
  double b_;
};

/// A one-dimensional objective given by callables, for unimodality checks.
class ScalarObjective final : public Objective {
 public:
  using Fn = std::function<double(double)>;
  ScalarObjective(Fn value, Fn derivative)
      : value_(std::move(value)), deriv_(std::move(derivative)) {}
  Index dimension() const override { return 1; }
  Evaluation evaluate(const Vector& x) const override;

 private:
  Fn value_;
  Fn deriv_;
};

}  // namespace qcagd
