#pragma once

// Shared vocabulary for the quasar-convex solvers: dense vectors, the
// value+gradient oracle abstraction with exact evaluation accounting, and the
// problem/trace data models.

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qcagd {

using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Raised when a problem, solver or run specification is inconsistent.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an oracle is queried at, or returns, a non-finite value.
class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Evaluation {
  double value = 0.0;
  Vector gradient;
};

/// A deterministic differentiable function f: R^n -> R.
///
/// Implementations must be pure: evaluate() is const, thread-safe and returns
/// identical output for identical input. Evaluation accounting lives in
/// CountedOracle, never in the objective itself.
class Objective {
 public:
  virtual ~Objective() = default;
  virtual Index dimension() const = 0;
  virtual Evaluation evaluate(const Vector& x) const = 0;
};

struct EvalCounters {
  std::int64_t function_evals = 0;
  std::int64_t gradient_evals = 0;
};

/// Per-run view of an objective that counts every query.
///
/// A combined value+gradient call increments both counters by exactly one.
/// Not thread-safe; each run owns its own instance.
class CountedOracle {
 public:
  explicit CountedOracle(const Objective& objective) : objective_(&objective) {}

  Index dimension() const { return objective_->dimension(); }
  const Objective& objective() const { return *objective_; }

  /// Returns (f(x), grad f(x)). Throws OracleError for non-finite input or
  /// output and ConfigError on a dimension mismatch.
  Evaluation eval(const Vector& x);

  const EvalCounters& counters() const { return counters_; }
  void reset_counters() { counters_ = {}; }

 private:
  const Objective* objective_;
  EvalCounters counters_;
};

inline Evaluation counted_eval(CountedOracle& oracle, const Vector& x) {
  return oracle.eval(x);
}

/// Central-difference gradient, (f(x+h e_i) - f(x-h e_i)) / 2h per component.
/// Evaluates the objective directly, so it never touches any run's counters.
Vector finite_diff_gradient(const Objective& objective, const Vector& x,
                            double h);

bool all_finite(const Vector& x);

/// Short human-readable rendering of a vector for diagnostics.
std::string describe(const Vector& x, Index max_entries = 6);

/// max(0, ln z), with log^+(0) = 0.
double log_plus(double z);
/// max(0, log2 z).
double log2_plus(double z);

struct KnownOptimum {
  Vector x_star;
  double f_star = 0.0;
};

/// An objective together with its declared regularity constants.
///
/// gamma in (0,1], mu >= 0, L > 0; if mu > 0 then L >= gamma*mu/(2-gamma).
/// R (an upper bound on ||x0 - x*||) and the optimum are optional and only
/// used for iteration budgets and instrumentation.
struct QuasarProblem {
  std::shared_ptr<const Objective> objective;
  double L = 1.0;
  double gamma = 1.0;
  double mu = 0.0;
  std::optional<double> R;
  std::optional<KnownOptimum> optimum;

  Index dimension() const { return objective->dimension(); }
  /// Throws ConfigError describing the first violated constraint.
  void validate() const;
};

enum class TerminationReason { kIterationBudget, kTargetReached, kGuardTripped };

std::string to_string(TerminationReason reason);

enum class LineSearchBranch { kNone, kEarlyOne, kEarlyZero, kBisection, kGuard };

std::string to_string(LineSearchBranch branch);

/// One row of a solver trace. Step fields (alpha, eta, y, gradient norm) are
/// absent on the terminal record, which only carries the final iterate.
struct IterateRecord {
  std::int64_t k = 0;
  // Iterates are only kept when SolveOptions::store_iterates is set.
  Vector x, v, y;
  double f_value = 0.0;  // f(x^(k))
  std::optional<double> eps;        // f(x^(k)) - f*
  std::optional<double> r;          // ||v^(k) - x*||^2
  std::optional<double> potential;  // eps + (mu/2) r
  std::optional<double> alpha;
  std::optional<double> eta;
  std::optional<double> grad_norm_y;
  // Margin of the strong quasar inequality at y^(k) when checked; negative
  // means the declared (gamma, mu) are violated there.
  std::optional<double> quasar_margin_y;
  LineSearchBranch branch = LineSearchBranch::kNone;
  std::int64_t linesearch_evals = 0;
  std::int64_t cumulative_fn_evals = 0;
  std::int64_t cumulative_grad_evals = 0;
};

struct SolverTrace {
  std::vector<IterateRecord> records;
  Vector final_point;
  TerminationReason termination = TerminationReason::kIterationBudget;
  std::int64_t iteration_budget = 0;
  std::int64_t linesearch_guard_count = 0;
  // Set when the final iterate's objective gap is known.
  std::optional<double> final_gap;
  std::string diagnostic;

  /// First k whose record has eps <= target, if any.
  std::optional<std::int64_t> first_iteration_below(double target) const;
};

}  // namespace qcagd
