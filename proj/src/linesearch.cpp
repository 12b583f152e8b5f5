#include "qcagd/linesearch.hpp"

#include <cassert>
#include <cmath>
#include <limits>

namespace qcagd {

namespace {

constexpr std::int64_t kGuardExtraIterations = 10;
constexpr std::int64_t kUnboundedIterationCap = 1100;

bool finite_nonnegative(double z) { return std::isfinite(z) && z >= 0.0; }

}  // namespace

void LineSearchParams::validate() const {
  if (!finite_nonnegative(b) || !finite_nonnegative(c) ||
      !finite_nonnegative(eps_tilde)) {
    throw ConfigError("line search requires finite b, c, eps_tilde >= 0");
  }
  if (!(L > 0.0) || !std::isfinite(L)) {
    throw ConfigError("line search requires L > 0");
  }
  if (x.size() != v.size()) {
    throw ConfigError("line search endpoints differ in dimension");
  }
}

SegmentFunction::SegmentFunction(CountedOracle& oracle, const Vector& x,
                                 const Vector& v)
    : oracle_(&oracle),
      x_(&x),
      v_(&v),
      direction_(x - v),
      squared_length_(direction_.squaredNorm()) {
  if (x.size() != v.size()) {
    throw ConfigError("segment endpoints differ in dimension");
  }
}

Vector SegmentFunction::point(double alpha) const {
  return alpha * (*x_) + (1.0 - alpha) * (*v_);
}

SegmentFunction::Sample SegmentFunction::operator()(double alpha) {
  const Evaluation e = oracle_->eval(point(alpha));
  return {e.value, e.gradient.dot(direction_)};
}

double linesearch_eval_bound(double L, double b, double c, double eps_tilde,
                             double squared_distance) {
  const double inf = std::numeric_limits<double>::infinity();
  double operand = inf;
  if (b > 0.0) operand = std::min(operand, (L * L * L) / (b * b * b));
  if (eps_tilde > 0.0) {
    operand = std::min(operand, L * squared_distance / eps_tilde);
  }
  if (std::isinf(operand)) return inf;
  return 5.0 + 2.0 * std::ceil(log2_plus((1.0 + c / 2.0) * operand));
}

double relaxed_condition_residual(const LineSearchOutcome& o, double b,
                                  double c, double eps_tilde) {
  const double a = o.alpha;
  const double lhs =
      a * o.slope_at_alpha - a * a * b * o.squared_distance;
  const double rhs = c * (o.value_at_one - o.value_at_alpha) + eps_tilde;
  return lhs - rhs;
}

double relaxed_condition_slack(const LineSearchOutcome& o) {
  return 1e-12 * std::max(1.0, std::abs(o.value_at_one));
}

LineSearchOutcome binary_line_search(const LineSearchParams& params,
                                     CountedOracle& oracle,
                                     const Evaluation* at_x,
                                     bool record_intervals) {
  params.validate();
  SegmentFunction g(oracle, params.x, params.v);
  const double d2 = g.squared_length();
  const double p = params.b * d2;
  const double eps = params.eps_tilde;
  const double c = params.c;

  LineSearchOutcome out;
  out.squared_distance = d2;

  SegmentFunction::Sample one;
  if (at_x != nullptr) {
    one = {at_x->value, at_x->gradient.dot(g.direction())};
  } else {
    one = g(1.0);
    ++out.evals;
  }
  out.value_at_one = one.value;

  if (one.slope <= eps + p) {
    out.alpha = 1.0;
    out.branch = LineSearchBranch::kEarlyOne;
    out.value_at_alpha = one.value;
    out.slope_at_alpha = one.slope;
    return out;
  }
  // g'(1) > 0 forces x != v, so the tau denominator below is positive.
  assert(d2 > 0.0);

  const SegmentFunction::Sample zero = g(0.0);
  ++out.evals;
  if (c == 0.0 || zero.value <= one.value + eps / c) {
    out.alpha = 0.0;
    out.branch = LineSearchBranch::kEarlyZero;
    out.value_at_alpha = zero.value;
    out.slope_at_alpha = zero.slope;
    return out;
  }

  // On a truly L-smooth f tau lies in (0, 1); a mis-declared L can push it
  // below zero, in which case the loop cannot terminate and the guard fires.
  const double tau = std::max(0.0, 1.0 - (eps + p) / (params.L * d2));
  out.tau = tau;
  const SegmentFunction::Sample at_tau = g(tau);
  ++out.evals;

  const double bound = linesearch_eval_bound(params.L, params.b, c, eps, d2);
  const std::int64_t cap =
      std::isinf(bound) ? kUnboundedIterationCap
                        : static_cast<std::int64_t>(bound) +
                              kGuardExtraIterations;

  double lo = 0.0;
  double hi = tau;
  double alpha = tau;
  SegmentFunction::Sample cur = at_tau;
  const double target = c * one.value + eps;
  out.branch = LineSearchBranch::kBisection;
  while (c * cur.value + alpha * (cur.slope - alpha * p) > target) {
    if (out.iterations >= cap) {
      out.branch = LineSearchBranch::kGuard;
      break;
    }
    alpha = 0.5 * (lo + hi);
    cur = g(alpha);
    ++out.evals;
    ++out.iterations;
    if (cur.value <= at_tau.value) {
      hi = alpha;
    } else {
      lo = alpha;
    }
    if (record_intervals) out.intervals.emplace_back(lo, hi);
  }
  out.alpha = alpha;
  out.value_at_alpha = cur.value;
  out.slope_at_alpha = cur.slope;
  return out;
}

}  // namespace qcagd
