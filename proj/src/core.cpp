#include "qcagd/core.hpp"

#include <cmath>
#include <sstream>

namespace qcagd {

bool all_finite(const Vector& x) { return x.allFinite(); }

std::string describe(const Vector& x, Index max_entries) {
  std::ostringstream os;
  os.precision(17);
  os << "[n=" << x.size() << ":";
  const Index shown = std::min(max_entries, x.size());
  for (Index i = 0; i < shown; ++i) os << " " << x[i];
  if (shown < x.size()) os << " ...";
  os << "]";
  return os.str();
}

Evaluation CountedOracle::eval(const Vector& x) {
  if (x.size() != objective_->dimension()) {
    throw ConfigError("oracle queried with dimension " +
                      std::to_string(x.size()) + ", expected " +
                      std::to_string(objective_->dimension()));
  }
  if (!all_finite(x)) {
    throw OracleError("oracle queried at non-finite point " + describe(x));
  }
  ++counters_.function_evals;
  ++counters_.gradient_evals;
  Evaluation e = objective_->evaluate(x);
  if (!std::isfinite(e.value) || e.gradient.size() != x.size() ||
      !all_finite(e.gradient)) {
    throw OracleError("oracle returned a non-finite value or gradient at " +
                      describe(x));
  }
  return e;
}

Vector finite_diff_gradient(const Objective& objective, const Vector& x,
                            double h) {
  if (!(h > 0.0)) throw ConfigError("finite difference step must be > 0");
  Vector grad(x.size());
  Vector probe = x;
  for (Index i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    probe[i] = xi + h;
    const double plus = objective.evaluate(probe).value;
    probe[i] = xi - h;
    const double minus = objective.evaluate(probe).value;
    probe[i] = xi;
    grad[i] = (plus - minus) / (2.0 * h);
  }
  return grad;
}

double log_plus(double z) { return z > 1.0 ? std::log(z) : 0.0; }
double log2_plus(double z) { return z > 1.0 ? std::log2(z) : 0.0; }

void QuasarProblem::validate() const {
  if (!objective) throw ConfigError("problem has no objective");
  if (!(L > 0.0) || !std::isfinite(L)) throw ConfigError("L must be > 0");
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw ConfigError("gamma must lie in (0, 1]");
  }
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw ConfigError("mu must be >= 0");
  // A (gamma, mu)-strongly quasar-convex function cannot be L-smooth for
  // L < gamma*mu/(2-gamma).
  if (mu > 0.0 && L < gamma * mu / (2.0 - gamma)) {
    throw ConfigError("inconsistent constants: L < gamma*mu/(2-gamma)");
  }
  if (R && !(*R >= 0.0)) throw ConfigError("R must be >= 0");
  if (optimum) {
    if (optimum->x_star.size() != dimension()) {
      throw ConfigError("known optimum has the wrong dimension");
    }
    if (!all_finite(optimum->x_star) || !std::isfinite(optimum->f_star)) {
      throw ConfigError("known optimum must be finite");
    }
  }
}

std::string to_string(TerminationReason reason) {
  switch (reason) {
    case TerminationReason::kIterationBudget: return "iteration-budget";
    case TerminationReason::kTargetReached: return "target-reached";
    case TerminationReason::kGuardTripped: return "guard-tripped";
  }
  return "unknown";
}

std::string to_string(LineSearchBranch branch) {
  switch (branch) {
    case LineSearchBranch::kNone: return "none";
    case LineSearchBranch::kEarlyOne: return "early-one";
    case LineSearchBranch::kEarlyZero: return "early-zero";
    case LineSearchBranch::kBisection: return "bisection";
    case LineSearchBranch::kGuard: return "guard";
  }
  return "unknown";
}

std::optional<std::int64_t> SolverTrace::first_iteration_below(
    double target) const {
  for (const auto& rec : records) {
    if (rec.eps && *rec.eps <= target) return rec.k;
  }
  return std::nullopt;
}

}  // namespace qcagd
