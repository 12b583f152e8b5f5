#include "qcagd/cli.hpp"

#include "qcagd/linesearch.hpp"
#include "qcagd/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace qcagd::cli {

namespace {

const json& require(const json& j, const std::string& key) {
  if (!j.contains(key)) throw SpecError(key, "missing");
  return j.at(key);
}

double get_number(const json& j, const std::string& key) {
  const json& v = require(j, key);
  if (!v.is_number()) throw SpecError(key, "must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw SpecError(key, "must be finite");
  return d;
}

double get_positive(const json& j, const std::string& key) {
  const double d = get_number(j, key);
  if (!(d > 0.0)) throw SpecError(key, "must be > 0");
  return d;
}

std::int64_t get_int(const json& j, const std::string& key) {
  const json& v = require(j, key);
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::isfinite(d) && d == std::floor(d) && std::abs(d) < 9e15) {
      return static_cast<std::int64_t>(d);
    }
  }
  throw SpecError(key, "must be an integer");
}

void reject_unknown(const json& j, const std::set<std::string>& allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) throw SpecError(it.key(), "unknown field");
  }
}

std::string num(double d) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", d);
  return buf;
}

std::string opt_num(const std::optional<double>& d) {
  return d ? num(*d) : std::string();
}

json opt_json(const std::optional<double>& d) {
  return d ? json(*d) : json(nullptr);
}

Vector vector_field(const json& j, const std::string& key, Index n) {
  const json& v = require(j, key);
  if (v.is_number()) return Vector::Constant(n, v.get<double>());
  if (!v.is_array()) throw SpecError(key, "must be a number or an array");
  if (static_cast<Index>(v.size()) != n) {
    throw SpecError(key, "has length " + std::to_string(v.size()) +
                             ", instance dimension is " + std::to_string(n));
  }
  Vector x(n);
  for (Index i = 0; i < n; ++i) {
    if (!v[static_cast<std::size_t>(i)].is_number()) {
      throw SpecError(key, "entries must be numbers");
    }
    x[i] = v[static_cast<std::size_t>(i)].get<double>();
  }
  return x;
}

}  // namespace

// ---------------------------------------------------------------------------
// instances

InstanceSpec InstanceSpec::from_json(const json& j) {
  if (!j.is_object()) throw SpecError("instance", "must be a JSON object");
  const json& k = require(j, "kind");
  if (!k.is_string()) throw SpecError("kind", "must be a string");
  const std::string kind = k.get<std::string>();
  InstanceSpec s;
  if (kind == "hard_scaled") {
    reject_unknown(j, {"kind", "L", "R", "gamma", "eps", "derived"});
    s.kind = InstanceKind::kHardScaled;
    s.L = get_positive(j, "L");
    s.R = get_positive(j, "R");
    s.gamma = get_positive(j, "gamma");
    s.eps = get_positive(j, "eps");
    if (s.gamma > 1e-2) throw SpecError("gamma", "must lie in (0, 1e-2]");
    if (std::sqrt(s.L) * s.R / std::sqrt(s.eps) < 1e3 * (1.0 - 1e-12)) {
      throw SpecError("eps", "needs L^(1/2) R eps^(-1/2) >= 1e3");
    }
  } else if (kind == "hard_unscaled") {
    reject_unknown(j, {"kind", "T", "sigma", "derived"});
    s.kind = InstanceKind::kHardUnscaled;
    s.T = get_int(j, "T");
    s.sigma = get_positive(j, "sigma");
    if (s.T < 1) throw SpecError("T", "must be >= 1");
    if (s.sigma > 1e-6) throw SpecError("sigma", "must lie in (0, 1e-6]");
    if (static_cast<double>(s.T) < (1.0 - 1e-12) / std::sqrt(s.sigma)) {
      throw SpecError("T", "must be >= sigma^(-1/2)");
    }
  } else if (kind == "quadratic") {
    reject_unknown(j, {"kind", "n", "mu", "L", "spectrum", "xstar_seed",
                       "derived"});
    s.kind = InstanceKind::kQuadratic;
    s.n = get_int(j, "n");
    if (s.n < 1) throw SpecError("n", "must be >= 1");
    s.mu = get_positive(j, "mu");
    s.L = get_positive(j, "L");
    if (s.L < s.mu) throw SpecError("L", "must be >= mu");
    const json& sp = require(j, "spectrum");
    if (!sp.is_string() || !parse_spectrum(sp.get<std::string>())) {
      throw SpecError("spectrum", "must be \"log\" or \"linear\"");
    }
    s.spectrum = *parse_spectrum(sp.get<std::string>());
    const std::int64_t seed = get_int(j, "xstar_seed");
    if (seed < 0) throw SpecError("xstar_seed", "must be >= 0");
    s.xstar_seed = static_cast<std::uint64_t>(seed);
  } else {
    throw SpecError("kind",
                    "must be hard_scaled, hard_unscaled or quadratic, got \"" +
                        kind + "\"");
  }
  return s;
}

json InstanceSpec::to_json() const {
  switch (kind) {
    case InstanceKind::kHardScaled:
      return {{"kind", "hard_scaled"}, {"L", L}, {"R", R},
              {"gamma", gamma},        {"eps", eps}};
    case InstanceKind::kHardUnscaled:
      return {{"kind", "hard_unscaled"}, {"T", T}, {"sigma", sigma}};
    case InstanceKind::kQuadratic:
      return {{"kind", "quadratic"},
              {"n", n},
              {"mu", mu},
              {"L", L},
              {"spectrum", qcagd::to_string(spectrum)},
              {"xstar_seed", xstar_seed}};
  }
  return {};
}

InstanceSpec parse_instance_arg(const std::string& arg) {
  const auto first = arg.find_first_not_of(" \t\r\n");
  std::string text;
  if (first != std::string::npos && arg[first] == '{') {
    text = arg;
  } else {
    std::ifstream in(arg);
    if (!in) throw SpecError("instance", "cannot read file '" + arg + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SpecError("instance", std::string("invalid JSON: ") + e.what());
  }
  return InstanceSpec::from_json(j);
}

BuiltInstance build_instance(const InstanceSpec& spec) {
  BuiltInstance b;
  switch (spec.kind) {
    case InstanceKind::kHardScaled: {
      const auto inst = HardInstanceScaled::make(spec.L, spec.R, spec.gamma,
                                                 spec.eps);
      b.chain_length = inst.T;
      b.nominal_L = inst.nominal_smoothness();
      b.sample_scale = spec.R / std::sqrt(static_cast<double>(inst.T));
      b.zero_chain = true;
      if (inst.T > kMaxChainLength) {
        b.over_cap = true;
        return b;
      }
      b.problem = make_problem(inst, SmoothnessConvention::kRigorous);
      return b;
    }
    case InstanceKind::kHardUnscaled: {
      const auto inst = HardInstanceUnscaled::make(spec.T, spec.sigma);
      b.chain_length = inst.T;
      b.nominal_L = inst.nominal_smoothness();
      b.zero_chain = true;
      if (inst.T > kMaxChainLength) {
        b.over_cap = true;
        return b;
      }
      b.problem = make_problem(inst, SmoothnessConvention::kRigorous);
      return b;
    }
    case InstanceKind::kQuadratic: {
      const Vector d = make_spectrum(spec.n, spec.mu, spec.L, spec.spectrum);
      const Vector xs = random_point(spec.n, spec.xstar_seed);
      b.problem = make_quadratic_problem(d, xs, spec.mu, spec.L);
      b.nominal_L = spec.L;
      return b;
    }
  }
  return b;
}

json derived_json(const InstanceSpec& spec) {
  json d;
  switch (spec.kind) {
    case InstanceKind::kHardScaled: {
      const auto inst = HardInstanceScaled::make(spec.L, spec.R, spec.gamma,
                                                 spec.eps);
      d = {{"T", inst.T},
           {"sigma", inst.sigma},
           {"gamma", inst.gamma},
           {"L_nominal", inst.nominal_smoothness()},
           {"L_rigorous", inst.smoothness_bound()},
           {"x_star_entry", spec.R / std::sqrt(static_cast<double>(inst.T))},
           {"f_star", 0.0},
           {"within_caps", inst.T <= kMaxChainLength}};
      break;
    }
    case InstanceKind::kHardUnscaled: {
      const auto inst = HardInstanceUnscaled::make(spec.T, spec.sigma);
      d = {{"T", inst.T},
           {"sigma", inst.sigma},
           {"gamma", *inst.declared_gamma()},
           {"L_nominal", inst.nominal_smoothness()},
           {"L_rigorous", inst.smoothness_bound()},
           {"x_star_entry", 1.0},
           {"f_star", 0.0},
           {"within_caps", inst.T <= kMaxChainLength}};
      break;
    }
    case InstanceKind::kQuadratic:
      d = {{"gamma", 1.0},
           {"mu", spec.mu},
           {"L", spec.L},
           {"kappa", spec.L / spec.mu},
           {"f_star", 0.0}};
      break;
  }
  return d;
}

// ---------------------------------------------------------------------------
// runs

std::optional<SolverKind> parse_solver(const std::string& name) {
  if (name == "agd-strong") return SolverKind::kAgdStrong;
  if (name == "agd-nonstrong") return SolverKind::kAgdNonstrong;
  if (name == "gd") return SolverKind::kGd;
  if (name == "regularized") return SolverKind::kRegularized;
  return std::nullopt;
}

std::string to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::kAgdStrong: return "agd-strong";
    case SolverKind::kAgdNonstrong: return "agd-nonstrong";
    case SolverKind::kGd: return "gd";
    case SolverKind::kRegularized: return "regularized";
  }
  return "?";
}

std::optional<Format> parse_format(const std::string& name) {
  if (name == "csv") return Format::kCsv;
  if (name == "json") return Format::kJson;
  return std::nullopt;
}

void RunSpec::validate() const {
  if (epsilon && !(*epsilon > 0.0 && std::isfinite(*epsilon))) {
    throw SpecError("eps", "must be > 0");
  }
  if (iterations && *iterations < 0) throw SpecError("iters", "must be >= 0");
  if (R && !(*R > 0.0 && std::isfinite(*R))) throw SpecError("R", "must be > 0");
  if (!epsilon && !iterations) {
    throw SpecError("eps", "either --eps or --iters is required");
  }
  if (!epsilon && (solver == SolverKind::kAgdNonstrong ||
                   solver == SolverKind::kRegularized)) {
    throw SpecError("eps", "required by solver " + to_string(solver));
  }
}

SolverTrace run_solver(const RunSpec& spec, const BuiltInstance& inst) {
  if (inst.over_cap) {
    SolverTrace t;
    t.termination = TerminationReason::kIterationBudget;
    t.diagnostic = "chain length " + std::to_string(*inst.chain_length) +
                   " exceeds the desk-scale cap " +
                   std::to_string(kMaxChainLength) + "; nothing was run";
    return t;
  }
  const QuasarProblem& p = inst.problem;
  SolveOptions o;
  o.iterations = spec.iterations;
  o.epsilon = spec.epsilon;
  o.R = spec.R;
  o.stop_at_target = spec.epsilon.has_value() && p.optimum.has_value();
  o.store_iterates = false;
  o.max_evaluations = kMaxEvaluations;
  const Vector x0 = Vector::Zero(p.dimension());
  switch (spec.solver) {
    case SolverKind::kAgdStrong:
      if (!(p.mu > 0.0)) {
        throw SpecError("solver",
                        "agd-strong needs an instance with mu > 0; use "
                        "agd-nonstrong or regularized");
      }
      return solve_strongly_qc(p, x0, o);
    case SolverKind::kAgdNonstrong:
      return solve_nonstrong_qc(p, x0, o);
    case SolverKind::kGd:
      return solve_gd(p, x0, o);
    case SolverKind::kRegularized:
      return solve_via_regularization(p, x0, o);
  }
  throw SpecError("solver", "unknown");
}

void write_trace_csv(std::ostream& os, const SolverTrace& trace) {
  const auto& cols = trace_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) {
    os << (i ? "," : "") << cols[i];
  }
  os << '\n';
  for (const IterateRecord& r : trace.records) {
    os << r.k << ',' << opt_num(r.eps) << ',' << opt_num(r.grad_norm_y) << ','
       << opt_num(r.alpha) << ',' << opt_num(r.eta) << ',' << r.linesearch_evals
       << ',' << r.cumulative_fn_evals << ',' << r.cumulative_grad_evals
       << '\n';
  }
}

json trace_to_json(const SolverTrace& trace) {
  json rows = json::array();
  for (const IterateRecord& r : trace.records) {
    rows.push_back({{"k", r.k},
                    {"f_gap", opt_json(r.eps)},
                    {"grad_norm_at_y", opt_json(r.grad_norm_y)},
                    {"alpha_k", opt_json(r.alpha)},
                    {"eta_k", opt_json(r.eta)},
                    {"linesearch_evals", r.linesearch_evals},
                    {"cum_fn_evals", r.cumulative_fn_evals},
                    {"cum_grad_evals", r.cumulative_grad_evals}});
  }
  return {{"termination", qcagd::to_string(trace.termination)},
          {"iteration_budget", trace.iteration_budget},
          {"final_gap", opt_json(trace.final_gap)},
          {"linesearch_guard_count", trace.linesearch_guard_count},
          {"diagnostic", trace.diagnostic},
          {"rows", rows}};
}

int exit_code(TerminationReason reason) {
  return reason == TerminationReason::kGuardTripped ? 2 : 0;
}

namespace {

// Writes through `fallback` when path is empty.
template <typename Fn>
void with_output(const std::string& path, std::ostream& fallback, Fn&& fn) {
  if (path.empty()) {
    fn(fallback);
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw SpecError("out", "cannot open '" + path + "' for writing");
  fn(f);
}

}  // namespace

int cmd_solve(const RunSpec& spec, std::ostream& out, std::ostream& log) {
  spec.validate();
  const BuiltInstance inst = build_instance(spec.instance);
  const SolverTrace trace = run_solver(spec, inst);
  with_output(spec.out, out, [&](std::ostream& os) {
    if (spec.format == Format::kCsv) {
      write_trace_csv(os, trace);
    } else {
      os << trace_to_json(trace).dump(1) << '\n';
    }
  });
  log << "solver=" << to_string(spec.solver)
      << " termination=" << qcagd::to_string(trace.termination)
      << " rows=" << trace.records.size();
  if (!trace.records.empty()) {
    log << " grad_evals=" << trace.records.back().cumulative_grad_evals;
  }
  if (trace.final_gap) log << " final_gap=" << num(*trace.final_gap);
  if (!trace.diagnostic.empty()) log << " note=\"" << trace.diagnostic << '"';
  log << '\n';
  return exit_code(trace.termination);
}

// ---------------------------------------------------------------------------
// scaling study

namespace {

std::vector<SolverKind> bench_solvers(const json& ss, const std::string& field) {
  if (!ss.is_array()) throw SpecError(field, "must be an array");
  std::vector<SolverKind> out;
  for (const json& s : ss) {
    const auto k = s.is_string() ? parse_solver(s.get<std::string>())
                                 : std::nullopt;
    if (!k || *k == SolverKind::kAgdStrong) {
      throw SpecError(field, "entries must be agd-nonstrong, gd or regularized");
    }
    out.push_back(*k);
  }
  return out;
}

}  // namespace

BenchConfig BenchConfig::from_json(const json& j) {
  if (!j.is_object()) throw SpecError("grid", "must be a JSON object");
  reject_unknown(j, {"L", "R", "grid", "gammas", "epsilons", "solvers"});
  BenchConfig c;
  if (j.contains("L")) c.L = get_positive(j, "L");
  if (j.contains("R")) c.R = get_positive(j, "R");
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    if (!g.is_array()) throw SpecError("grid", "must be an array");
    for (std::size_t i = 0; i < g.size(); ++i) {
      const json& p = g[i];
      const std::string field = "grid[" + std::to_string(i) + "]";
      if (!p.is_object()) throw SpecError(field, "must be a JSON object");
      reject_unknown(p, {"gamma", "eps", "solvers"});
      BenchPoint pt{get_positive(p, "gamma"), get_positive(p, "eps"), {}};
      if (p.contains("solvers")) {
        pt.solvers = bench_solvers(p.at("solvers"), field + ".solvers");
      }
      c.grid.push_back(pt);
    }
  }
  if (j.contains("gammas") || j.contains("epsilons")) {
    const json& gs = require(j, "gammas");
    const json& es = require(j, "epsilons");
    if (!gs.is_array()) throw SpecError("gammas", "must be an array");
    if (!es.is_array()) throw SpecError("epsilons", "must be an array");
    for (const json& g : gs) {
      for (const json& e : es) {
        if (!g.is_number()) throw SpecError("gammas", "entries must be numbers");
        if (!e.is_number()) throw SpecError("epsilons", "entries must be numbers");
        c.grid.push_back({g.get<double>(), e.get<double>(), {}});
      }
    }
  }
  if (c.grid.empty()) throw SpecError("grid", "must not be empty");
  if (j.contains("solvers")) {
    c.solvers = bench_solvers(j.at("solvers"), "solvers");
  } else {
    c.solvers = {SolverKind::kAgdNonstrong, SolverKind::kGd};
  }
  for (std::size_t i = 0; i < c.grid.size(); ++i) {
    const BenchPoint& p = c.grid[i];
    const std::string field = "grid[" + std::to_string(i) + "]";
    if (!(p.gamma > 0.0 && p.gamma <= 1e-2)) {
      throw SpecError(field + ".gamma", "must lie in (0, 1e-2]");
    }
    if (!(p.eps > 0.0) ||
        std::sqrt(c.L) * c.R / std::sqrt(p.eps) < 1e3 * (1.0 - 1e-12)) {
      throw SpecError(field + ".eps", "needs L^(1/2) R eps^(-1/2) >= 1e3");
    }
  }
  return c;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ConfigError("slope needs matching x and y");
  if (x.size() < 4) throw ConfigError("slope needs at least 4 points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
      throw ConfigError("slope needs positive coordinates");
    }
    lx.push_back(std::log10(x[i]));
    ly.push_back(std::log10(y[i]));
    mx += lx.back();
    my += ly.back();
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (!(sxx > 0.0)) throw ConfigError("slope needs distinct x values");
  return sxy / sxx;
}

BenchResult run_bench(const BenchConfig& config) {
  BenchResult res;
  for (const BenchPoint& pt : config.grid) {
    const auto inst = HardInstanceScaled::make(config.L, config.R, pt.gamma,
                                               pt.eps);
    for (SolverKind solver : pt.solvers.empty() ? config.solvers : pt.solvers) {
      BenchRow row;
      row.solver = solver;
      row.gamma = pt.gamma;
      row.eps = pt.eps;
      row.T = inst.T;
      if (inst.T > kMaxChainLength) {
        res.rows.push_back(row);
        continue;
      }
      RunSpec spec;
      spec.solver = solver;
      spec.epsilon = pt.eps;
      BuiltInstance b;
      b.problem = make_problem(inst, SmoothnessConvention::kRigorous);
      b.chain_length = inst.T;
      const SolverTrace trace = run_solver(spec, b);
      row.termination = trace.termination;
      if (const auto k = trace.first_iteration_below(pt.eps)) {
        row.iterations_to_eps = *k;
        for (const IterateRecord& r : trace.records) {
          if (r.k == *k) {
            row.evals_to_eps = r.cumulative_grad_evals;
            break;
          }
        }
      }
      res.rows.push_back(row);
    }
  }

  // Groups keyed by (solver, held-fixed coordinate), in first-seen order.
  auto fit = [&](const std::string& against) {
    std::vector<std::pair<SolverKind, double>> keys;
    for (const BenchRow& r : res.rows) {
      const std::pair<SolverKind, double> key{
          r.solver, against == "eps" ? r.gamma : r.eps};
      if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
        keys.push_back(key);
      }
    }
    for (const auto& [solver, fixed] : keys) {
      std::vector<double> xs, ys;
      for (const BenchRow& r : res.rows) {
        const double held = against == "eps" ? r.gamma : r.eps;
        if (r.solver != solver || held != fixed || !r.iterations_to_eps ||
            *r.iterations_to_eps <= 0) {
          continue;
        }
        xs.push_back(against == "eps" ? r.eps : r.gamma);
        ys.push_back(static_cast<double>(*r.iterations_to_eps));
      }
      std::set<double> distinct(xs.begin(), xs.end());
      if (distinct.size() < 4) continue;
      res.slopes.push_back({solver, against, fixed,
                            static_cast<std::int64_t>(xs.size()),
                            loglog_slope(xs, ys)});
    }
  };
  fit("eps");
  fit("gamma");
  return res;
}

void write_bench_csv(std::ostream& os, const BenchResult& result) {
  os << "solver,gamma,eps,T,iterations_to_eps,evals_to_eps,termination\n";
  for (const BenchRow& r : result.rows) {
    os << to_string(r.solver) << ',' << num(r.gamma) << ',' << num(r.eps)
       << ',' << r.T << ','
       << (r.iterations_to_eps ? std::to_string(*r.iterations_to_eps) : "")
       << ',' << (r.evals_to_eps ? std::to_string(*r.evals_to_eps) : "")
       << ',' << qcagd::to_string(r.termination) << '\n';
  }
  os << "\nsolver,against,fixed,points,slope\n";
  for (const SlopeFit& s : result.slopes) {
    os << to_string(s.solver) << ',' << s.against << ',' << num(s.fixed) << ','
       << s.points << ',' << num(s.slope) << '\n';
  }
}

json bench_to_json(const BenchResult& result) {
  json rows = json::array();
  for (const BenchRow& r : result.rows) {
    rows.push_back(
        {{"solver", to_string(r.solver)},
         {"gamma", r.gamma},
         {"eps", r.eps},
         {"T", r.T},
         {"iterations_to_eps",
          r.iterations_to_eps ? json(*r.iterations_to_eps) : json(nullptr)},
         {"evals_to_eps", r.evals_to_eps ? json(*r.evals_to_eps) : json(nullptr)},
         {"termination", qcagd::to_string(r.termination)}});
  }
  json slopes = json::array();
  for (const SlopeFit& s : result.slopes) {
    slopes.push_back({{"solver", to_string(s.solver)},
                      {"against", s.against},
                      {"fixed", s.fixed},
                      {"points", s.points},
                      {"slope", s.slope}});
  }
  return {{"rows", rows}, {"slopes", slopes}};
}

// ---------------------------------------------------------------------------
// line search probe

ProbeSpec ProbeSpec::from_json(const json& j, Index dimension) {
  if (!j.is_object()) throw SpecError("params", "must be a JSON object");
  reject_unknown(j, {"x", "v", "b", "c", "eps_tilde", "L"});
  ProbeSpec p;
  p.x = vector_field(j, "x", dimension);
  p.v = vector_field(j, "v", dimension);
  if (j.contains("b")) p.b = get_number(j, "b");
  if (j.contains("c")) p.c = get_number(j, "c");
  if (j.contains("eps_tilde")) p.eps_tilde = get_number(j, "eps_tilde");
  if (j.contains("L")) p.L = get_positive(j, "L");
  if (p.b < 0.0) throw SpecError("b", "must be >= 0");
  if (p.c < 0.0) throw SpecError("c", "must be >= 0");
  if (p.eps_tilde < 0.0) throw SpecError("eps_tilde", "must be >= 0");
  return p;
}

json linesearch_probe(const BuiltInstance& inst, const ProbeSpec& probe) {
  if (inst.over_cap) throw SpecError("instance", "exceeds the desk-scale cap");
  LineSearchParams params;
  params.b = probe.b;
  params.c = probe.c;
  params.eps_tilde = probe.eps_tilde;
  params.L = probe.L ? *probe.L : inst.problem.L;
  params.x = *probe.x;
  params.v = *probe.v;
  CountedOracle oracle(*inst.problem.objective);
  const LineSearchOutcome out = binary_line_search(params, oracle);
  const double bound = linesearch_eval_bound(
      params.L, params.b, params.c, params.eps_tilde, out.squared_distance);
  const double residual =
      relaxed_condition_residual(out, params.b, params.c, params.eps_tilde);
  return {{"alpha", out.alpha},
          {"branch", qcagd::to_string(out.branch)},
          {"evals", out.evals},
          {"bisection_steps", out.iterations},
          {"tau", out.tau},
          {"bound", std::isfinite(bound) ? json(bound) : json("inf")},
          {"residual", residual},
          {"slack", relaxed_condition_slack(out)},
          {"condition_holds", residual <= relaxed_condition_slack(out)},
          {"L", params.L}};
}

// ---------------------------------------------------------------------------
// verification

json verify_report(const BuiltInstance& inst, std::uint64_t seed,
                   std::int64_t samples) {
  if (inst.over_cap) throw SpecError("instance", "exceeds the desk-scale cap");
  if (samples < 1) throw SpecError("samples", "must be >= 1");
  const QuasarProblem& p = inst.problem;
  const Objective& f = *p.objective;
  const KnownOptimum& opt = *p.optimum;

  SamplerSpec ss;
  ss.count = samples;
  ss.seed = seed;
  ss.scale = inst.sample_scale;
  ss.transition_fraction = inst.zero_chain ? 0.5 : 0.0;
  const std::vector<Vector> xs = draw_samples(p.dimension(), ss);
  // The certificate is taken around x*: box samples are offsets from it for
  // the quadratic family, whose minimizer is not at the origin.
  std::vector<Vector> pts = xs;
  if (!inst.zero_chain) {
    for (Vector& x : pts) x += opt.x_star;
  }

  const QuasarCertificate cert = estimate_gamma(f, opt.x_star, p.mu, pts, seed);
  std::int64_t quasar_bad = 0;
  for (const Vector& x : pts) {
    const double fx = f.evaluate(x).value;
    const double tol =
        kCheckTolerance * std::max({1.0, std::abs(fx), std::abs(opt.f_star)});
    if (strong_quasar_margin(f, x, opt.x_star, opt.f_star, p.gamma, p.mu) <
        -tol) {
      ++quasar_bad;
    }
  }

  SamplerSpec sm = ss;
  sm.count = std::min<std::int64_t>(samples, 2000);
  const SmoothnessReport smooth = smoothness_estimate(f, sm, inst.nominal_L);

  json violations = json::array();
  if (!cert.valid) {
    violations.push_back(
        {{"check", "certificate"},
         {"detail", "a sample admits no positive gamma"},
         {"sample", cert.witnesses.empty() ? -1 : cert.witnesses.front().sample}});
  }
  if (quasar_bad > 0) {
    violations.push_back({{"check", "quasar_inequality"},
                          {"declared_gamma", p.gamma},
                          {"declared_mu", p.mu},
                          {"count", quasar_bad}});
  }
  if (smooth.L_hat > inst.nominal_L * (1.0 + 1e-9)) {
    violations.push_back({{"check", "smoothness"},
                          {"declared_L", inst.nominal_L},
                          {"L_hat", smooth.L_hat}});
  }
  if (smooth.descent_violations > 0) {
    violations.push_back({{"check", "descent"},
                          {"declared_L", inst.nominal_L},
                          {"count", smooth.descent_violations}});
  }
  if (inst.zero_chain) {
    // Prefix-supported copies of the samples, with varying support length.
    std::vector<Vector> prefixed = xs;
    for (std::size_t i = 0; i < prefixed.size(); ++i) {
      const Index keep = static_cast<Index>((i * 7919) % static_cast<std::size_t>(p.dimension()));
      prefixed[i].tail(p.dimension() - keep).setZero();
    }
    const std::int64_t zc = zero_chain_violations(f, prefixed);
    if (zc > 0) {
      violations.push_back({{"check", "zero_chain"}, {"count", zc}});
    }
  }
  return {{"gamma_hat", cert.gamma_hat},
          {"gamma_valid", cert.valid},
          {"L_hat", smooth.L_hat},
          {"declared", {{"gamma", p.gamma}, {"mu", p.mu}, {"L", inst.nominal_L}}},
          {"sample_count", cert.sample_count},
          {"violations", violations},
          {"seed", seed}};
}

}  // namespace qcagd::cli
