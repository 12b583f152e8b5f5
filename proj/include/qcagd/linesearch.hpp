#pragma once

// Binary search for the momentum parameter alpha in [0, 1].
//
// Along the segment g(a) = f(a x + (1-a) v), the search returns an alpha with
//
//   a g'(a) - a^2 b ||x-v||^2 <= c (g(1) - g(a)) + eps_tilde,
//
// which does not require convexity of f along the segment, only smoothness.

#include "qcagd/core.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace qcagd {

struct LineSearchParams {
  double b = 0.0;
  double c = 0.0;
  double eps_tilde = 0.0;
  double L = 1.0;
  Vector x;
  Vector v;

  void validate() const;
};

struct LineSearchOutcome {
  double alpha = 1.0;
  std::int64_t evals = 0;  // counted oracle calls made by the search
  LineSearchBranch branch = LineSearchBranch::kEarlyOne;
  std::int64_t iterations = 0;  // bisection steps
  double tau = 1.0;
  // g and g' at the returned alpha; the slope is irrelevant (and left 0)
  // on the early-zero branch since it is multiplied by alpha = 0.
  double value_at_alpha = 0.0;
  double slope_at_alpha = 0.0;
  double value_at_one = 0.0;
  double squared_distance = 0.0;  // ||x - v||^2
  // (lo, hi) after each bisection step when recording is requested.
  std::vector<std::pair<double, double>> intervals;
};

/// The restriction g(a) = f(a x + (1 - a) v) of an oracle to a segment.
/// Every query costs exactly one counted oracle call.
class SegmentFunction {
 public:
  struct Sample {
    double value = 0.0;  // g(a)
    double slope = 0.0;  // g'(a) = grad f(y_a)^T (x - v)
  };

  SegmentFunction(CountedOracle& oracle, const Vector& x, const Vector& v);

  Sample operator()(double alpha);
  Vector point(double alpha) const;
  const Vector& direction() const { return direction_; }
  double squared_length() const { return squared_length_; }

 private:
  CountedOracle* oracle_;
  const Vector* x_;
  const Vector* v_;
  Vector direction_;
  double squared_length_;
};

inline SegmentFunction restrict_to_segment(CountedOracle& oracle,
                                           const Vector& x, const Vector& v) {
  return SegmentFunction(oracle, x, v);
}

/// Worst-case number of evaluations of the search:
///   5 + 2 ceil(log2^+((1 + c/2) min{L^3/b^3, L ||x-v||^2 / eps_tilde})).
/// Operands with a zero denominator are dropped from the min; if both are
/// dropped the bound is +infinity.
double linesearch_eval_bound(double L, double b, double c, double eps_tilde,
                             double squared_distance);

/// Left side minus right side of the relaxed momentum condition. The
/// condition holds iff the residual is <= 0.
double relaxed_condition_residual(const LineSearchOutcome& outcome, double b,
                                  double c, double eps_tilde);

/// Slack allowed on the relaxed condition: 1e-12 * max(1, |g(1)|).
double relaxed_condition_slack(const LineSearchOutcome& outcome);

/// Runs the binary search. `at_x`, when given, must be the evaluation of the
/// oracle at params.x; it supplies g(1) and g'(1) without a new call.
///
/// The bisection loop is capped at the evaluation bound plus 10 iterations
/// (or 1100 iterations when the bound is infinite); hitting the cap returns
/// the current alpha with branch kGuard.
LineSearchOutcome binary_line_search(const LineSearchParams& params,
                                     CountedOracle& oracle,
                                     const Evaluation* at_x = nullptr,
                                     bool record_intervals = false);

}  // namespace qcagd
