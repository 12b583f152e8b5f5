#pragma once

// Accelerated first-order methods for (strongly) quasar-convex objectives.
//
// All methods are instances of one two-sequence scheme: given x^(k), v^(k),
//
//   y     = alpha x + (1 - alpha) v
//   x^+   = y - (1/L) grad f(y)
//   v^+   = beta v + (1 - beta) y - eta grad f(y)
//
// and differ only in beta, the eta schedule and how alpha is chosen. Runs are
// single-threaded, deterministic, and stop purely on an iteration budget (or
// on reaching a target gap when the optimum is known and stop_at_target is
// set).

#include "qcagd/core.hpp"
#include "qcagd/linesearch.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace qcagd {

/// The sequence w^(-1) = 1, w^(k) = w^(k-1) (sqrt(w^(k-1)^2 + 4) - w^(k-1)) / 2.
/// Values are memoized; 1/(k+2) <= w^(k) <= 4/(k+6) for k >= 0.
class OmegaSequence {
 public:
  OmegaSequence();
  /// k >= -1.
  double operator()(std::int64_t k);

 private:
  std::vector<double> values_;  // values_[k + 1] = w^(k)
};

/// Free-function form backed by a process-wide thread-local cache.
double omega(std::int64_t k);

struct AgdState {
  Vector x;
  Vector v;
};

struct StepResult {
  AgdState next;
  Evaluation at_y;
  Vector y;
};

/// One iteration of the two-sequence scheme. Makes exactly one counted oracle
/// call, at y. Requires alpha in [0,1] and eta >= gamma/L.
StepResult agd_step(const AgdState& state, double beta, double eta,
                    double alpha, const QuasarProblem& problem,
                    CountedOracle& oracle);

struct SolveOptions {
  /// Iteration budget K; derived from epsilon (and R or an initial-gap
  /// bound) when absent.
  std::optional<std::int64_t> iterations;
  std::optional<double> epsilon;
  /// Upper bound on f(x0) - f*, used for the strongly quasar-convex budget.
  std::optional<double> initial_gap_bound;
  /// Overrides problem.R for the non-strongly quasar-convex budget.
  std::optional<double> R;
  /// Stop as soon as f(x^(k)) - f* <= epsilon (requires a known optimum).
  bool stop_at_target = false;
  /// Keep x, v, y on every record. Disable for long high-dimensional runs.
  bool store_iterates = true;
  /// Check the strong quasar inequality at every y^(k) (needs the optimum).
  bool check_quasar_at_y = false;
  /// Hard cap on counted evaluations; exceeding it ends the run as
  /// iteration-budget.
  std::int64_t max_evaluations = 100'000'000;
};

/// Strongly quasar-convex method (mu > 0): beta = 1 - gamma sqrt(mu/L),
/// eta = 1/sqrt(mu L), alpha by binary search with b = (1-beta)/(2 eta),
/// c = (L eta - gamma)/beta, eps_tilde = 0 (alpha = 1 when beta = 0).
/// Default budget: ceil(sqrt(kappa)/gamma * log^+(3 eps0 / (gamma eps))).
SolverTrace solve_strongly_qc(const QuasarProblem& problem, const Vector& x0,
                              const SolveOptions& options);

/// Non-strongly quasar-convex method: beta = 1, eta^(k) = gamma/(L w^(k)),
/// alpha by binary search with b = 0, c = L eta^(k) - gamma,
/// eps_tilde = gamma eps / 2. Default budget: floor(4 sqrt(L) R / (gamma
/// sqrt(eps))).
SolverTrace solve_nonstrong_qc(const QuasarProblem& problem, const Vector& x0,
                               const SolveOptions& options);

/// Gradient descent with step 1/L; one oracle call per iteration.
SolverTrace solve_gd(const QuasarProblem& problem, const Vector& x0,
                     const SolveOptions& options);

/// Minimizes the quasar-convex f through g(x) = f(x) + eps/(2R^2)||x - x0||^2,
/// which is (gamma, eps/R^2)-strongly quasar-convex w.r.t. x* and
/// (L + eps/R^2)-smooth, solved to accuracy eps/2 by solve_strongly_qc.
///
/// Records report g's gap measured against x* (g(x^(k)) - g(x*), which may
/// be negative); final_gap reports the gap of f itself.
SolverTrace solve_via_regularization(const QuasarProblem& problem,
                                     const Vector& x0,
                                     const SolveOptions& options);

/// Budget formulas, exposed for callers that size runs up front.
std::int64_t strong_iteration_budget(double L, double mu, double gamma,
                                     double initial_gap, double epsilon);
std::int64_t nonstrong_iteration_budget(double L, double R, double gamma,
                                        double epsilon);

/// An objective wrapped with the proximal term eps/(2R^2)||x - center||^2.
class RegularizedObjective final : public Objective {
 public:
  RegularizedObjective(std::shared_ptr<const Objective> base, Vector center,
                       double weight);
  Index dimension() const override { return base_->dimension(); }
  Evaluation evaluate(const Vector& x) const override;
  double penalty(const Vector& x) const;

 private:
  std::shared_ptr<const Objective> base_;
  Vector center_;
  double weight_;  // coefficient of ||x - center||^2
};

}  // namespace qcagd
