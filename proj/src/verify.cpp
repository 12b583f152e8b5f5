#include "qcagd/verify.hpp"

#include "qcagd/instances.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace qcagd {

namespace {

double rel_scale(double a, double b) {
  return std::max({1.0, std::abs(a), std::abs(b)});
}

// A chain transition pattern in unit coordinates.
Vector transition_pattern(Index n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  Vector x(n);
  if (n == 1) {
    x[0] = 0.9 + 0.3 * u01(rng);
    return x;
  }
  const Index head = static_cast<Index>(u01(rng) * static_cast<double>(n - 1));
  const Index room = n - head - 1;
  const Index ramp =
      1 + static_cast<Index>(u01(rng) * static_cast<double>(std::max<Index>(room, 1)));
  for (Index i = 0; i <= head && i < n; ++i) x[i] = 0.9 + 0.3 * u01(rng);
  for (Index s = 1; s <= ramp && head + s < n; ++s) {
    const double frac = static_cast<double>(s) / static_cast<double>(ramp);
    double v = 0.9 - 0.8 * frac + 0.02 * (u01(rng) - 0.5);
    x[head + s] = std::clamp(v, -0.1, 0.9);
  }
  for (Index i = head + ramp + 1; i < n; ++i) x[i] = -0.2 + 0.3 * u01(rng);
  return x;
}

}  // namespace

std::vector<Vector> draw_samples(Index n, const SamplerSpec& spec) {
  if (n < 1) throw ConfigError("sampler needs dimension >= 1");
  if (spec.count < 0) throw ConfigError("sampler count must be >= 0");
  if (!(spec.hi > spec.lo)) throw ConfigError("sampler needs lo < hi");
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> box(spec.lo, spec.hi);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(spec.count));
  for (std::int64_t s = 0; s < spec.count; ++s) {
    Vector x(n);
    if (spec.transition_fraction > 0.0 && u01(rng) < spec.transition_fraction) {
      x = transition_pattern(n, rng);
    } else {
      for (Index i = 0; i < n; ++i) x[i] = box(rng);
    }
    out.push_back(spec.scale * x);
  }
  return out;
}

Index nonzero_prefix(const Vector& x, double threshold) {
  for (Index i = x.size(); i > 0; --i) {
    if (std::abs(x[i - 1]) > threshold) return i;
  }
  return 0;
}

// ---------------------------------------------------------------------------

QuasarCertificate estimate_gamma(const Objective& f, const Vector& x_star,
                                 double mu, const std::vector<Vector>& samples,
                                 std::uint64_t seed) {
  if (!(mu >= 0.0)) throw ConfigError("mu must be >= 0");
  const double f_star = f.evaluate(x_star).value;
  QuasarCertificate cert;
  cert.seed = seed;
  cert.sample_count = static_cast<std::int64_t>(samples.size());
  std::vector<QuasarWitness> all;
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const Vector& x = samples[s];
    const Evaluation e = f.evaluate(x);
    const double scale = rel_scale(e.value, f_star);
    if (e.value < f_star - kCheckTolerance * scale) {
      throw std::runtime_error("sample " + std::to_string(s) +
                               " has f(x) < f(x*): x* is not a minimizer");
    }
    const Vector d = x - x_star;
    const double num = e.gradient.dot(d);
    const double den = e.value - f_star + 0.5 * mu * d.squaredNorm();
    double g = 1.0;
    if (den > 1e-14 * scale) {
      g = num <= 0.0 ? 0.0 : std::min(1.0, num / den);
    }
    all.push_back({static_cast<std::int64_t>(s), g, x});
  }
  std::stable_sort(all.begin(), all.end(),
                   [](const auto& a, const auto& b) { return a.gamma < b.gamma; });
  if (!all.empty()) {
    cert.gamma_hat = all.front().gamma;
    cert.valid = cert.gamma_hat > 0.0;
    for (std::size_t i = 0; i < all.size() && i < 5; ++i) {
      if (all[i].gamma >= 1.0) break;
      cert.witnesses.push_back(all[i]);
    }
  }
  return cert;
}

double strong_quasar_margin(const Objective& f, const Vector& x,
                            const Vector& x_star, double f_star, double gamma,
                            double mu) {
  const Evaluation e = f.evaluate(x);
  const Vector d = x_star - x;
  return f_star - (e.value + e.gradient.dot(d) / gamma + 0.5 * mu * d.squaredNorm());
}

EquivalenceReport check_gradient_chord_equivalence(
    const Objective& f, const Vector& x_star, double gamma, double mu,
    const std::vector<Vector>& samples, const std::vector<double>& t_grid) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in (0,1]");
  const double f_star = f.evaluate(x_star).value;
  EquivalenceReport rep;
  for (const Vector& x : samples) {
    const double fx = f.evaluate(x).value;
    const double r = (x_star - x).squaredNorm();
    const double scale = rel_scale(fx, f_star);
    bool bad = false;
    if (strong_quasar_margin(f, x, x_star, f_star, gamma, mu) <
        -kCheckTolerance * scale) {
      ++rep.differential_violations;
      bad = true;
    }
    for (double t : t_grid) {
      const Vector z = t * x_star + (1.0 - t) * x;
      const double lhs = f.evaluate(z).value +
                         t * (1.0 - t / (2.0 - gamma)) * 0.5 * gamma * mu * r;
      const double rhs = gamma * t * f_star + (1.0 - gamma * t) * fx;
      if (lhs > rhs + kCheckTolerance * scale) {
        ++rep.chord_violations;
        bad = true;
      }
    }
    if (fx - f_star < gamma * mu / (2.0 * (2.0 - gamma)) * r -
                          kCheckTolerance * scale) {
      ++rep.corollary_violations;
      bad = true;
    }
    if (bad && rep.witnesses.size() < 5) rep.witnesses.push_back(x);
  }
  rep.agree = (rep.differential_violations == 0) == (rep.chord_violations == 0);
  return rep;
}

SmoothnessReport smoothness_estimate(const Objective& f,
                                     const SamplerSpec& spec, double L) {
  const Index n = f.dimension();
  const std::vector<Vector> xs = draw_samples(n, spec);
  std::mt19937_64 rng(spec.seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> gauss(0.0, 1.0);
  SmoothnessReport rep;
  auto ratio = [&](const Vector& a, const Evaluation& ea, const Vector& b) {
    const double dx = (a - b).norm();
    if (dx == 0.0) return;
    const Evaluation eb = f.evaluate(b);
    rep.L_hat = std::max(rep.L_hat, (ea.gradient - eb.gradient).norm() / dx);
    ++rep.pairs;
  };
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const Vector& x = xs[i];
    const Evaluation ex = f.evaluate(x);
    if (i + 1 < xs.size()) ratio(x, ex, xs[i + 1]);
    Vector u(n);
    for (Index j = 0; j < n; ++j) u[j] = gauss(rng);
    ratio(x, ex, x + 1e-3 * spec.scale * u / std::max(u.norm(), 1e-300));
    if (L > 0.0) {
      const double g2 = ex.gradient.squaredNorm();
      const double after = f.evaluate(x - ex.gradient / L).value;
      if (after > ex.value - g2 / (2.0 * L) +
                      kCheckTolerance * rel_scale(ex.value, after)) {
        ++rep.descent_violations;
      }
    }
  }
  return rep;
}

ScalingReport check_scaling_invariance(std::shared_ptr<const Objective> f,
                                       const Vector& x_star, double a,
                                       double b,
                                       const std::vector<Vector>& samples) {
  ScalingReport rep;
  rep.gamma_original = estimate_gamma(*f, x_star, 0.0, samples).gamma_hat;
  const AffineScaledObjective g(f, a, b);
  std::vector<Vector> mapped;
  mapped.reserve(samples.size());
  for (const Vector& x : samples) mapped.push_back(x / b);
  rep.gamma_scaled = estimate_gamma(g, x_star / b, 0.0, mapped).gamma_hat;
  rep.equal = std::abs(rep.gamma_original - rep.gamma_scaled) <=
              1e-9 * std::max(1e-300, rep.gamma_original);
  return rep;
}

TradeoffReport check_tradeoff(const Objective& f, const Vector& x_star,
                              double gamma, double mu, double theta,
                              const std::vector<Vector>& samples) {
  if (!(theta > 0.0 && theta <= 1.0)) throw ConfigError("theta must lie in (0,1]");
  const double f_star = f.evaluate(x_star).value;
  TradeoffReport rep;
  for (const Vector& x : samples) {
    const double tol = kCheckTolerance * rel_scale(f.evaluate(x).value, f_star);
    const bool orig =
        strong_quasar_margin(f, x, x_star, f_star, gamma, mu) >= -tol;
    const bool traded = strong_quasar_margin(f, x, x_star, f_star,
                                             theta * gamma, mu / theta) >= -tol;
    if (!orig) ++rep.violations_original;
    if (!traded) ++rep.violations_traded;
    if (orig && !traded) rep.implied = false;
  }
  return rep;
}

UnimodalityReport check_unimodal_line(const Objective& f, const Vector& x_star,
                                      const Vector& direction, double s_max,
                                      std::int64_t grid_points) {
  if (grid_points < 2) throw ConfigError("grid needs >= 2 points");
  UnimodalityReport rep;
  const double dn = direction.norm();
  for (std::int64_t i = 0; i < grid_points; ++i) {
    const double s = -s_max + 2.0 * s_max * static_cast<double>(i) /
                                  static_cast<double>(grid_points - 1);
    if (s == 0.0) continue;
    const Vector x = x_star + s * direction;
    const Evaluation e = f.evaluate(x);
    const double slope = e.gradient.dot(direction);
    ++rep.grid_points;
    // Directional derivatives at rounding level carry no sign information.
    if (std::abs(slope) <= 1e-13 * dn * std::max(1.0, e.gradient.norm())) {
      continue;
    }
    if ((slope > 0.0) != (s > 0.0)) ++rep.violations;
  }
  return rep;
}

std::int64_t zero_chain_violations(const Objective& f,
                                   const std::vector<Vector>& samples) {
  std::int64_t bad = 0;
  for (const Vector& x : samples) {
    const Index p = nonzero_prefix(x, 0.0);
    const Vector g = f.evaluate(x).gradient;
    if (nonzero_prefix(g, 0.0) > p + 1) ++bad;
  }
  return bad;
}

// ---------------------------------------------------------------------------

Evaluation PrefixRecordingObjective::evaluate(const Vector& x) const {
  Evaluation e = base_->evaluate(x);
  // Exact support: tiny entries still feed later gradients.
  calls_.push_back({nonzero_prefix(x, 0.0), nonzero_prefix(e.gradient, 0.0), e.value});
  return e;
}

std::optional<std::int64_t> PrefixTrace::first_call_at_or_below(
    double threshold) const {
  for (std::size_t i = 0; i < calls.size(); ++i) {
    if (calls[i].value <= threshold) return static_cast<std::int64_t>(i + 1);
  }
  return std::nullopt;
}

PrefixTrace analyse_prefix_calls(std::vector<PrefixCall> calls,
                                 Index start_prefix) {
  PrefixTrace t;
  Index reach = start_prefix;       // span of start point and past gradients
  Index max_query = start_prefix;
  for (std::size_t i = 0; i < calls.size(); ++i) {
    const PrefixCall& c = calls[i];
    if (c.query_prefix > max_query) {
      t.max_jump = std::max(t.max_jump, c.query_prefix - max_query);
      max_query = c.query_prefix;
    }
    if (c.query_prefix > reach && t.zero_respecting) {
      t.zero_respecting = false;
      t.first_violation = static_cast<std::int64_t>(i);
    }
    reach = std::max(reach, c.gradient_prefix);
  }
  t.calls = std::move(calls);
  return t;
}

PrefixTrace run_with_prefix_instrumentation(const SolverHandle& method,
                                            const QuasarProblem& problem) {
  auto recorder = std::make_shared<PrefixRecordingObjective>(problem.objective);
  QuasarProblem wrapped = problem;
  wrapped.objective = recorder;
  SolverTrace trace = method(wrapped, Vector::Zero(problem.dimension()));
  PrefixTrace out = analyse_prefix_calls(recorder->calls(), 0);
  out.solver_trace = std::move(trace);
  return out;
}

}  // namespace qcagd
