#include "qcagd/solvers.hpp"

#include <cmath>
#include <limits>

namespace qcagd {

// ---------------------------------------------------------------------------
// omega sequence

OmegaSequence::OmegaSequence() : values_{1.0} {}

double OmegaSequence::operator()(std::int64_t k) {
  if (k < -1) throw ConfigError("omega is defined for k >= -1");
  const auto idx = static_cast<std::size_t>(k + 1);
  while (values_.size() <= idx) {
    const double w = values_.back();
    values_.push_back(0.5 * w * (std::sqrt(w * w + 4.0) - w));
  }
  return values_[idx];
}

double omega(std::int64_t k) {
  thread_local OmegaSequence cache;
  return cache(k);
}

// ---------------------------------------------------------------------------
// budgets

std::int64_t strong_iteration_budget(double L, double mu, double gamma,
                                     double initial_gap, double epsilon) {
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be > 0");
  const double kappa = L / mu;
  const double k =
      std::sqrt(kappa) / gamma * log_plus(3.0 * initial_gap / (gamma * epsilon));
  return static_cast<std::int64_t>(std::ceil(k));
}

std::int64_t nonstrong_iteration_budget(double L, double R, double gamma,
                                        double epsilon) {
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be > 0");
  return static_cast<std::int64_t>(
      std::floor(4.0 / gamma * std::sqrt(L) * R / std::sqrt(epsilon)));
}

// ---------------------------------------------------------------------------
// single step

StepResult agd_step(const AgdState& state, double beta, double eta,
                    double alpha, const QuasarProblem& problem,
                    CountedOracle& oracle) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ConfigError("alpha must lie in [0, 1]");
  }
  if (!(beta >= 0.0 && beta <= 1.0)) throw ConfigError("beta must lie in [0, 1]");
  if (!(eta >= problem.gamma / problem.L)) {
    throw ConfigError("eta must be >= gamma / L");
  }
  StepResult out;
  out.y = alpha * state.x + (1.0 - alpha) * state.v;
  out.at_y = oracle.eval(out.y);
  const Vector& grad = out.at_y.gradient;
  out.next.x = out.y - grad / problem.L;
  out.next.v = beta * state.v + (1.0 - beta) * out.y - eta * grad;
  return out;
}

namespace {

// How alpha^(k) is produced: binary search with these (b, c, eps_tilde), or
// the constant 1 when empty.
struct AlphaRule {
  double b = 0.0;
  double c = 0.0;
  double eps_tilde = 0.0;
};

struct Schedule {
  double beta = 1.0;
  std::function<double(std::int64_t)> eta;
  std::function<std::optional<AlphaRule>(std::int64_t, double eta)> alpha;
};

void fill_diagnostics(IterateRecord& rec, const QuasarProblem& problem,
                      const Vector& v) {
  if (!problem.optimum) return;
  rec.eps = rec.f_value - problem.optimum->f_star;
  rec.r = (v - problem.optimum->x_star).squaredNorm();
  rec.potential = *rec.eps + 0.5 * problem.mu * *rec.r;
}

void stamp_counters(IterateRecord& rec, const CountedOracle& oracle) {
  rec.cumulative_fn_evals = oracle.counters().function_evals;
  rec.cumulative_grad_evals = oracle.counters().gradient_evals;
}

double quasar_margin(const QuasarProblem& problem, const Vector& y,
                     const Evaluation& at_y) {
  const Vector diff = problem.optimum->x_star - y;
  const double rhs = at_y.value + at_y.gradient.dot(diff) / problem.gamma +
                     0.5 * problem.mu * diff.squaredNorm();
  return problem.optimum->f_star - rhs;
}

bool diverged(const IterateRecord& rec, std::optional<double> eps0) {
  return rec.eps && eps0 && *eps0 > 0.0 && *rec.eps > 1e6 * *eps0;
}

// The budget is resolved from the (counted) evaluation at x0 so that sizing a
// run from the measured initial gap costs no hidden oracle call.
SolverTrace run_framework(
    const QuasarProblem& problem, const Vector& x0,
    const std::function<std::int64_t(const Evaluation&)>& budget_for,
    const SolveOptions& options, const Schedule& schedule) {
  SolverTrace trace;
  if (x0.size() != problem.dimension()) {
    throw ConfigError("initial point has the wrong dimension");
  }
  const bool can_stop = options.stop_at_target && options.epsilon &&
                        problem.optimum.has_value();

  CountedOracle oracle(*problem.objective);
  AgdState state{x0, x0};
  Evaluation at_x;
  try {
    at_x = oracle.eval(state.x);
  } catch (const OracleError& e) {
    trace.termination = TerminationReason::kGuardTripped;
    trace.diagnostic = e.what();
    trace.final_point = x0;
    return trace;
  }
  const std::int64_t budget = budget_for(at_x);
  if (budget < 0) throw ConfigError("iteration budget must be >= 0");
  trace.iteration_budget = budget;

  std::optional<double> eps0;
  if (problem.optimum) eps0 = at_x.value - problem.optimum->f_star;

  auto start_record = [&](std::int64_t k) {
    IterateRecord rec;
    rec.k = k;
    rec.f_value = at_x.value;
    if (options.store_iterates) {
      rec.x = state.x;
      rec.v = state.v;
    }
    fill_diagnostics(rec, problem, state.v);
    stamp_counters(rec, oracle);
    return rec;
  };

  std::int64_t k = 0;
  bool finished = false;
  for (; k < budget; ++k) {
    IterateRecord rec = start_record(k);
    if (can_stop && *rec.eps <= *options.epsilon) {
      trace.termination = TerminationReason::kTargetReached;
      trace.records.push_back(std::move(rec));
      finished = true;
      break;
    }
    if (diverged(rec, eps0)) {
      trace.termination = TerminationReason::kGuardTripped;
      trace.diagnostic = "objective gap exceeded 1e6 times its initial value";
      trace.records.push_back(std::move(rec));
      finished = true;
      break;
    }
    if (oracle.counters().function_evals >= options.max_evaluations) {
      trace.termination = TerminationReason::kIterationBudget;
      trace.diagnostic = "evaluation cap reached";
      trace.records.push_back(std::move(rec));
      finished = true;
      break;
    }

    const double eta = schedule.eta(k);
    double alpha = 1.0;
    try {
      if (const auto rule = schedule.alpha(k, eta)) {
        LineSearchParams params{rule->b,  rule->c, rule->eps_tilde,
                                problem.L, state.x, state.v};
        const LineSearchOutcome ls = binary_line_search(params, oracle, &at_x);
        alpha = ls.alpha;
        rec.branch = ls.branch;
        rec.linesearch_evals = ls.evals;
        if (ls.branch == LineSearchBranch::kGuard) ++trace.linesearch_guard_count;
      }
      StepResult step =
          agd_step(state, schedule.beta, eta, alpha, problem, oracle);
      rec.alpha = alpha;
      rec.eta = eta;
      rec.grad_norm_y = step.at_y.gradient.norm();
      if (options.check_quasar_at_y && problem.optimum) {
        rec.quasar_margin_y = quasar_margin(problem, step.y, step.at_y);
      }
      if (options.store_iterates) rec.y = step.y;
      if (!all_finite(step.next.x) || !all_finite(step.next.v)) {
        throw OracleError("non-finite iterate at k = " + std::to_string(k + 1));
      }
      state = std::move(step.next);
      at_x = oracle.eval(state.x);
    } catch (const OracleError& e) {
      stamp_counters(rec, oracle);
      trace.records.push_back(std::move(rec));
      trace.termination = TerminationReason::kGuardTripped;
      trace.diagnostic = e.what();
      trace.final_point = state.x;
      return trace;
    }
    stamp_counters(rec, oracle);
    trace.records.push_back(std::move(rec));
  }
  if (!finished) {
    trace.records.push_back(start_record(k));
    trace.termination = TerminationReason::kIterationBudget;
  }
  trace.final_point = state.x;
  trace.final_gap = trace.records.back().eps;
  return trace;
}

double resolve_R(const QuasarProblem& problem, const Vector& x0,
                 const SolveOptions& options) {
  if (options.R) return *options.R;
  if (problem.R) return *problem.R;
  if (problem.optimum) return (x0 - problem.optimum->x_star).norm();
  throw ConfigError("R is required (pass R, K, or a known optimum)");
}

}  // namespace

// ---------------------------------------------------------------------------
// solvers

SolverTrace solve_strongly_qc(const QuasarProblem& problem, const Vector& x0,
                              const SolveOptions& options) {
  problem.validate();
  if (!(problem.mu > 0.0)) {
    throw ConfigError(
        "strongly quasar-convex solver needs mu > 0; use solve_nonstrong_qc");
  }
  const double L = problem.L;
  const double mu = problem.mu;
  const double gamma = problem.gamma;

  if (!options.iterations) {
    if (!options.epsilon) {
      throw ConfigError("epsilon or an iteration budget is required");
    }
    if (!options.initial_gap_bound && !problem.optimum) {
      throw ConfigError(
          "an initial-gap bound or known optimum is required to size the run");
    }
  }
  auto budget_for = [&](const Evaluation& at_x0) -> std::int64_t {
    if (options.iterations) return *options.iterations;
    const double gap = options.initial_gap_bound
                           ? *options.initial_gap_bound
                           : at_x0.value - problem.optimum->f_star;
    return strong_iteration_budget(L, mu, gamma, gap, *options.epsilon);
  };

  Schedule s;
  s.beta = std::max(0.0, 1.0 - gamma * std::sqrt(mu / L));
  const double eta = 1.0 / std::sqrt(mu * L);
  const double beta = s.beta;
  s.eta = [eta](std::int64_t) { return eta; };
  s.alpha = [beta, L, gamma](std::int64_t,
                             double eta_k) -> std::optional<AlphaRule> {
    if (!(beta > 0.0)) return std::nullopt;
    return AlphaRule{(1.0 - beta) / (2.0 * eta_k),
                     (L * eta_k - gamma) / beta, 0.0};
  };
  return run_framework(problem, x0, budget_for, options, s);
}

SolverTrace solve_nonstrong_qc(const QuasarProblem& problem, const Vector& x0,
                               const SolveOptions& options) {
  problem.validate();
  if (!options.epsilon || !(*options.epsilon > 0.0)) {
    throw ConfigError("non-strongly quasar-convex solver needs epsilon > 0");
  }
  const double L = problem.L;
  const double gamma = problem.gamma;
  const double eps = *options.epsilon;

  std::int64_t budget = 0;
  if (options.iterations) {
    budget = *options.iterations;
  } else {
    budget = nonstrong_iteration_budget(L, resolve_R(problem, x0, options),
                                        gamma, eps);
  }

  Schedule s;
  s.beta = 1.0;
  s.eta = [L, gamma](std::int64_t k) { return gamma / (L * omega(k)); };
  s.alpha = [L, gamma, eps](std::int64_t,
                            double eta_k) -> std::optional<AlphaRule> {
    return AlphaRule{0.0, L * eta_k - gamma, 0.5 * gamma * eps};
  };
  return run_framework(
      problem, x0, [budget](const Evaluation&) { return budget; }, options, s);
}

SolverTrace solve_gd(const QuasarProblem& problem, const Vector& x0,
                     const SolveOptions& options) {
  problem.validate();
  std::int64_t budget = 0;
  if (options.iterations) {
    budget = *options.iterations;
  } else if (options.epsilon && (options.R || problem.R || problem.optimum)) {
    // Step 1/L needs O(L R^2 / (gamma eps)) iterations; this is a generous
    // multiple of that rate used only when no budget is given.
    const double R = resolve_R(problem, x0, options);
    budget = static_cast<std::int64_t>(std::ceil(
        2.0 * problem.L * R * R / (problem.gamma * *options.epsilon)));
  } else {
    throw ConfigError("gradient descent needs K, or epsilon with R");
  }

  SolverTrace trace;
  trace.iteration_budget = budget;
  if (x0.size() != problem.dimension()) {
    throw ConfigError("initial point has the wrong dimension");
  }
  const bool can_stop = options.stop_at_target && options.epsilon &&
                        problem.optimum.has_value();
  CountedOracle oracle(*problem.objective);
  Vector x = x0;
  std::optional<double> eps0;
  const double step = 1.0 / problem.L;

  std::int64_t k = 0;
  for (;; ++k) {
    IterateRecord rec;
    rec.k = k;
    Evaluation e;
    try {
      e = oracle.eval(x);
    } catch (const OracleError& err) {
      trace.termination = TerminationReason::kGuardTripped;
      trace.diagnostic = err.what();
      break;
    }
    rec.f_value = e.value;
    if (options.store_iterates) {
      rec.x = x;
      rec.v = x;
    }
    fill_diagnostics(rec, problem, x);
    if (k == 0) eps0 = rec.eps;
    stamp_counters(rec, oracle);

    if (can_stop && *rec.eps <= *options.epsilon) {
      trace.termination = TerminationReason::kTargetReached;
      trace.records.push_back(std::move(rec));
      break;
    }
    if (diverged(rec, eps0)) {
      trace.termination = TerminationReason::kGuardTripped;
      trace.diagnostic = "objective gap exceeded 1e6 times its initial value";
      trace.records.push_back(std::move(rec));
      break;
    }
    if (k >= budget || oracle.counters().function_evals >= options.max_evaluations) {
      trace.termination = TerminationReason::kIterationBudget;
      if (k < budget) trace.diagnostic = "evaluation cap reached";
      trace.records.push_back(std::move(rec));
      break;
    }
    // Gradient descent is the scheme with alpha = 1 and a pure x-update.
    rec.alpha = 1.0;
    rec.eta = step;
    rec.grad_norm_y = e.gradient.norm();
    if (options.store_iterates) rec.y = x;
    if (options.check_quasar_at_y && problem.optimum) {
      rec.quasar_margin_y = quasar_margin(problem, x, e);
    }
    trace.records.push_back(std::move(rec));
    x -= step * e.gradient;
    if (!all_finite(x)) {
      trace.termination = TerminationReason::kGuardTripped;
      trace.diagnostic = "non-finite iterate at k = " + std::to_string(k + 1);
      break;
    }
  }
  trace.final_point = x;
  if (!trace.records.empty()) trace.final_gap = trace.records.back().eps;
  return trace;
}

// ---------------------------------------------------------------------------
// regularization reduction

RegularizedObjective::RegularizedObjective(std::shared_ptr<const Objective> base,
                                           Vector center, double weight)
    : base_(std::move(base)), center_(std::move(center)), weight_(weight) {
  if (center_.size() != base_->dimension()) {
    throw ConfigError("regularization center has the wrong dimension");
  }
}

double RegularizedObjective::penalty(const Vector& x) const {
  return weight_ * (x - center_).squaredNorm();
}

Evaluation RegularizedObjective::evaluate(const Vector& x) const {
  Evaluation e = base_->evaluate(x);
  e.value += penalty(x);
  e.gradient += 2.0 * weight_ * (x - center_);
  return e;
}

SolverTrace solve_via_regularization(const QuasarProblem& problem,
                                     const Vector& x0,
                                     const SolveOptions& options) {
  problem.validate();
  if (!options.epsilon || !(*options.epsilon > 0.0)) {
    throw ConfigError("regularized solver needs epsilon > 0");
  }
  const double eps = *options.epsilon;
  const double R = resolve_R(problem, x0, options);
  if (!(R > 0.0)) throw ConfigError("regularized solver needs R > 0");

  const double mu = eps / (R * R);
  auto reg = std::make_shared<RegularizedObjective>(problem.objective, x0,
                                                    0.5 * mu);
  QuasarProblem inner;
  inner.objective = reg;
  inner.L = problem.L + mu;
  inner.gamma = problem.gamma;
  inner.mu = mu;
  inner.R = R;
  if (problem.optimum) {
    // x* is the reference point of g, not necessarily its minimizer.
    inner.optimum = KnownOptimum{
        problem.optimum->x_star,
        problem.optimum->f_star + reg->penalty(problem.optimum->x_star)};
  }

  SolveOptions inner_opts = options;
  inner_opts.epsilon = 0.5 * eps;
  if (!inner_opts.iterations && !inner_opts.initial_gap_bound) {
    // g(x0) - g(x*) <= f(x0) - f(x*) <= L R^2 / 2.
    inner_opts.initial_gap_bound = 0.5 * problem.L * R * R;
  }
  SolverTrace trace = solve_strongly_qc(inner, x0, inner_opts);
  if (problem.optimum && !trace.records.empty()) {
    const double f_final =
        trace.records.back().f_value - reg->penalty(trace.final_point);
    trace.final_gap = f_final - problem.optimum->f_star;
  } else {
    trace.final_gap.reset();
  }
  return trace;
}

}  // namespace qcagd
