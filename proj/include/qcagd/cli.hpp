#pragma once

// Run specifications, instance JSON, trace writers and the subcommand
// implementations behind the qcagd executable.

#include "qcagd/core.hpp"
#include "qcagd/instances.hpp"
#include "qcagd/verify.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace qcagd::cli {

using json = nlohmann::json;

/// A malformed run or instance specification. `field` names the offender.
class SpecError : public ConfigError {
 public:
  SpecError(std::string field, const std::string& message)
      : ConfigError(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

inline constexpr std::int64_t kMaxChainLength = 100'000;
inline constexpr std::int64_t kMaxEvaluations = 100'000'000;

enum class InstanceKind { kHardScaled, kHardUnscaled, kQuadratic };

struct InstanceSpec {
  InstanceKind kind = InstanceKind::kQuadratic;
  // hard_scaled
  double L = 1.0;
  double R = 1.0;
  double gamma = 1e-2;
  double eps = 1e-6;
  // hard_unscaled
  std::int64_t T = 1000;
  double sigma = 1e-6;
  // quadratic (also uses L)
  std::int64_t n = 1;
  double mu = 1.0;
  Spectrum spectrum = Spectrum::kLog;
  std::uint64_t xstar_seed = 0;

  static InstanceSpec from_json(const json& j);
  json to_json() const;
};

/// Reads a spec from a file path, or parses the argument itself when it
/// starts with '{'.
InstanceSpec parse_instance_arg(const std::string& arg);

/// A constructed instance. Hard instances are declared with the provable
/// smoothness bound so that the 1/L steps of every solver are safe.
struct BuiltInstance {
  QuasarProblem problem;
  std::optional<std::int64_t> chain_length;
  /// The nominal smoothness constant advertised for the instance.
  double nominal_L = 1.0;
  /// Multiplies unit-box samples so they cover the instance's natural scale.
  double sample_scale = 1.0;
  bool zero_chain = false;
  /// Chain length over the desk-scale cap: the objective is not built.
  bool over_cap = false;
};

BuiltInstance build_instance(const InstanceSpec& spec);

/// Derived constants reported by instance-dump.
json derived_json(const InstanceSpec& spec);

enum class SolverKind { kAgdStrong, kAgdNonstrong, kGd, kRegularized };

std::optional<SolverKind> parse_solver(const std::string& name);
std::string to_string(SolverKind kind);

enum class Format { kCsv, kJson };

std::optional<Format> parse_format(const std::string& name);

struct RunSpec {
  InstanceSpec instance;
  SolverKind solver = SolverKind::kAgdNonstrong;
  std::optional<double> epsilon;
  std::optional<std::int64_t> iterations;
  std::optional<double> R;
  std::uint64_t seed = 0;
  std::string out;  // empty: standard output
  Format format = Format::kCsv;

  void validate() const;
};

/// Runs the solver from x0 = 0, stopping at the target when f* is known and
/// epsilon is set.
SolverTrace run_solver(const RunSpec& spec, const BuiltInstance& inst);

inline const std::vector<std::string>& trace_columns() {
  static const std::vector<std::string> cols = {
      "k",        "f_gap",           "grad_norm_at_y", "alpha_k",
      "eta_k",    "linesearch_evals", "cum_fn_evals",  "cum_grad_evals"};
  return cols;
}

void write_trace_csv(std::ostream& os, const SolverTrace& trace);
json trace_to_json(const SolverTrace& trace);

/// Exit status for a finished run: 0 for budget/target, 2 for a guard trip.
int exit_code(TerminationReason reason);

int cmd_solve(const RunSpec& spec, std::ostream& out, std::ostream& log);

struct BenchPoint {
  double gamma = 1e-2;
  double eps = 1e-6;
  std::vector<SolverKind> solvers;  // empty: the config's list
};

struct BenchConfig {
  double L = 1.0;
  double R = 1.0;
  std::vector<BenchPoint> grid;
  std::vector<SolverKind> solvers;

  static BenchConfig from_json(const json& j);
};

struct BenchRow {
  SolverKind solver = SolverKind::kAgdNonstrong;
  double gamma = 0.0;
  double eps = 0.0;
  std::int64_t T = 0;
  std::optional<std::int64_t> iterations_to_eps;
  std::optional<std::int64_t> evals_to_eps;  // gradient evaluations
  TerminationReason termination = TerminationReason::kIterationBudget;
};

struct SlopeFit {
  SolverKind solver = SolverKind::kAgdNonstrong;
  std::string against;  // "eps" or "gamma"
  double fixed = 0.0;   // the other coordinate, held fixed
  std::int64_t points = 0;
  double slope = 0.0;
};

struct BenchResult {
  std::vector<BenchRow> rows;
  std::vector<SlopeFit> slopes;
};

/// Ordinary least squares slope of log10(y) against log10(x).
/// Requires at least 4 points with positive coordinates.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Runs every solver at every grid point, in grid order, then fits slopes of
/// iterations-to-eps against eps (per fixed gamma) and against gamma (per
/// fixed eps) for every group with at least 4 distinct points.
BenchResult run_bench(const BenchConfig& config);

void write_bench_csv(std::ostream& os, const BenchResult& result);
json bench_to_json(const BenchResult& result);

struct ProbeSpec {
  std::optional<Vector> x;
  std::optional<Vector> v;
  double b = 0.0;
  double c = 1.0;
  double eps_tilde = 0.0;
  std::optional<double> L;

  static ProbeSpec from_json(const json& j, Index dimension);
};

json linesearch_probe(const BuiltInstance& inst, const ProbeSpec& probe);

/// Sampled certificate of the instance: gamma_hat, L_hat and any violation of
/// the declared constants.
json verify_report(const BuiltInstance& inst, std::uint64_t seed,
                   std::int64_t samples);

}  // namespace qcagd::cli
