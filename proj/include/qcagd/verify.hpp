#pragma once

// Sampling-based certification of quasar-convexity, smoothness, the
// structural identities of the function class, and zero-respecting behaviour
// of methods on zero-chains.
//
// Every certificate here holds over the drawn samples only. Seeds are part of
// the input, so a certificate is reproducible bit for bit.

#include "qcagd/core.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace qcagd {

/// Sample points u drawn uniformly from [lo, hi]^n, mapped to center + scale*u.
/// A fraction of the samples can instead be chain transition patterns: a
/// prefix of entries >= 0.9, a descending ramp through [0.1, 0.9], then a
/// tail of entries <= 0.1.
struct SamplerSpec {
  std::int64_t count = 1000;
  std::uint64_t seed = 0;
  double lo = -2.0;
  double hi = 3.0;
  double scale = 1.0;
  double transition_fraction = 0.0;
};

std::vector<Vector> draw_samples(Index n, const SamplerSpec& spec);

/// 1 + index of the last entry with |x_i| > threshold (0 for the zero vector).
Index nonzero_prefix(const Vector& x, double threshold = 1e-14);

struct QuasarWitness {
  std::int64_t sample = 0;
  double gamma = 0.0;  // largest gamma admitted by this sample
  Vector x;
};

struct QuasarCertificate {
  /// Largest gamma in (0,1] satisfying the inequality on every sample;
  /// meaningful only when `valid`.
  double gamma_hat = 1.0;
  /// False when some sample admits no positive gamma at all.
  bool valid = true;
  std::vector<QuasarWitness> witnesses;  // the binding samples, tightest first
  std::int64_t sample_count = 0;
  std::uint64_t seed = 0;
};

/// Largest gamma with f(x*) >= f(x) + (1/gamma) grad f(x)^T (x* - x)
///   + (mu/2)||x* - x||^2 on every sample.
/// Throws std::runtime_error if some sample has f(x) < f(x*) (x* is then not
/// a minimizer).
QuasarCertificate estimate_gamma(const Objective& f, const Vector& x_star,
                                 double mu, const std::vector<Vector>& samples,
                                 std::uint64_t seed = 0);

/// f(x*) - [f(x) + (1/gamma) g^T (x* - x) + (mu/2)||x* - x||^2]; >= 0 iff the
/// strong quasar inequality holds at x.
double strong_quasar_margin(const Objective& f, const Vector& x,
                            const Vector& x_star, double f_star, double gamma,
                            double mu);

/// Relative tolerance used by the pointwise checks below.
inline constexpr double kCheckTolerance = 1e-12;

struct EquivalenceReport {
  std::int64_t differential_violations = 0;  // gradient form
  std::int64_t chord_violations = 0;         // segment form, over (x, t)
  std::int64_t corollary_violations = 0;     // t = 1 distance bound
  bool agree = true;
  std::vector<Vector> witnesses;
};

/// Checks, over the samples and t-grid, the gradient form of strong
/// quasar-convexity against its chord form
///   f(t x* + (1-t) x) + t (1 - t/(2-gamma)) (gamma mu/2) ||x* - x||^2
///     <= gamma t f(x*) + (1 - gamma t) f(x),
/// and the distance bound f(x) - f* >= gamma mu / (2 (2-gamma)) ||x* - x||^2.
/// `agree` is true when both forms hold or both fail on the sample set.
EquivalenceReport check_gradient_chord_equivalence(
    const Objective& f, const Vector& x_star, double gamma, double mu,
    const std::vector<Vector>& samples, const std::vector<double>& t_grid);

struct SmoothnessReport {
  double L_hat = 0.0;
  std::int64_t pairs = 0;
  /// Samples where f(x - g/L) > f(x) - ||g||^2/(2L) for the L passed in.
  std::int64_t descent_violations = 0;
};

/// Max of ||grad f(x) - grad f(y)|| / ||x - y|| over sampled pairs: each
/// sample is paired with the next one and with a nearby perturbation.
SmoothnessReport smoothness_estimate(const Objective& f,
                                     const SamplerSpec& spec, double L);

struct ScalingReport {
  double gamma_original = 0.0;
  double gamma_scaled = 0.0;
  bool equal = false;
};

/// gamma_hat of a f(b x) (minimizer x*/b, samples x/b) against gamma_hat of f.
ScalingReport check_scaling_invariance(std::shared_ptr<const Objective> f,
                                       const Vector& x_star, double a,
                                       double b,
                                       const std::vector<Vector>& samples);

struct TradeoffReport {
  std::int64_t violations_original = 0;
  std::int64_t violations_traded = 0;
  bool implied = true;  // traded holds wherever original holds
};

/// If the strong inequality holds at (gamma, mu), it must hold at
/// (theta gamma, mu / theta) for theta in (0, 1].
TradeoffReport check_tradeoff(const Objective& f, const Vector& x_star,
                              double gamma, double mu, double theta,
                              const std::vector<Vector>& samples);

struct UnimodalityReport {
  std::int64_t grid_points = 0;
  std::int64_t violations = 0;
};

/// On the line x* + s d, checks sign(d^T grad f) == sign(s) for s != 0 on a
/// uniform grid over [-s_max, s_max], ignoring points where the directional
/// derivative vanishes to rounding.
UnimodalityReport check_unimodal_line(const Objective& f, const Vector& x_star,
                                      const Vector& direction, double s_max,
                                      std::int64_t grid_points);

/// Number of samples whose support prefix p yields a gradient with a nonzero
/// entry beyond index p + 1. Zero for a first-order zero-chain.
std::int64_t zero_chain_violations(const Objective& f,
                                   const std::vector<Vector>& samples);

struct PrefixCall {
  Index query_prefix = 0;
  Index gradient_prefix = 0;
  double value = 0.0;
};

struct PrefixTrace {
  std::vector<PrefixCall> calls;
  /// Largest increase of the running max query prefix in a single call.
  Index max_jump = 0;
  /// Every query stayed inside the span of the start point and the
  /// coordinates of previously returned gradients.
  bool zero_respecting = true;
  std::int64_t first_violation = -1;
  SolverTrace solver_trace;

  /// 1-based index of the first call whose value is <= threshold.
  std::optional<std::int64_t> first_call_at_or_below(double threshold) const;
};

/// An objective decorator that logs the support of every query and gradient.
/// Not thread-safe: intended for a single instrumented run.
class PrefixRecordingObjective final : public Objective {
 public:
  explicit PrefixRecordingObjective(std::shared_ptr<const Objective> base)
      : base_(std::move(base)) {}
  Index dimension() const override { return base_->dimension(); }
  Evaluation evaluate(const Vector& x) const override;
  const std::vector<PrefixCall>& calls() const { return calls_; }

 private:
  std::shared_ptr<const Objective> base_;
  mutable std::vector<PrefixCall> calls_;
};

using SolverHandle =
    std::function<SolverTrace(const QuasarProblem&, const Vector&)>;

/// Runs `method` from x0 = 0 on `problem` with an instrumented oracle and
/// analyses prefix growth. A jump > 1 is reported, not thrown.
PrefixTrace run_with_prefix_instrumentation(const SolverHandle& method,
                                            const QuasarProblem& problem);

/// Analyses an already-recorded call log.
PrefixTrace analyse_prefix_calls(std::vector<PrefixCall> calls,
                                 Index start_prefix = 0);

}  // namespace qcagd
