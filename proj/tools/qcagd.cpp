// qcagd: solve, benchmark and certify quasar-convex instances.

#include "qcagd/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace qcagd;
using namespace qcagd::cli;

namespace {

json read_json_arg(const std::string& arg, const std::string& field) {
  std::string text = arg;
  const auto first = arg.find_first_not_of(" \t\r\n");
  if (first == std::string::npos || arg[first] != '{') {
    std::ifstream in(arg);
    if (!in) throw SpecError(field, "cannot read file '" + arg + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw SpecError(field, std::string("invalid JSON: ") + e.what());
  }
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw SpecError("out", "cannot open '" + path + "' for writing");
  f << text;
}

// The default scaling study: an eps sweep at gamma = 1e-2 and a gamma sweep
// at eps = 1e-6, both with L = R = 1.
BenchConfig default_bench() {
  BenchConfig c;
  for (double e : {1e-6, 6.3e-7, 4e-7, 2.5e-7}) c.grid.push_back({1e-2, e, {}});
  // GD needs ~T^2 iterations, so it only runs along the eps sweep.
  for (double g : {6.3e-3, 4e-3, 2.5e-3}) {
    c.grid.push_back({g, 1e-6, {SolverKind::kAgdNonstrong}});
  }
  c.solvers = {SolverKind::kAgdNonstrong, SolverKind::kGd};
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Accelerated methods for quasar-convex minimization"};
  app.require_subcommand(1);

  std::string instance, solver = "agd-nonstrong", out, format = "csv", grid,
              params;
  std::optional<double> eps, R;
  std::optional<std::int64_t> iters;
  std::uint64_t seed = 0;
  std::int64_t samples = 1000;

  auto* solve = app.add_subcommand("solve", "Run a solver and write its trace");
  solve->add_option("--instance", instance, "Instance JSON file or inline JSON")
      ->required();
  solve->add_option("--solver", solver,
                    "agd-strong | agd-nonstrong | gd | regularized");
  solve->add_option("--eps", eps, "Target accuracy");
  solve->add_option("--iters", iters, "Iteration budget K");
  solve->add_option("--R", R, "Bound on ||x0 - x*||");
  solve->add_option("--seed", seed, "Seed (recorded; runs are deterministic)");
  solve->add_option("--out", out, "Output path (default: stdout)");
  solve->add_option("--format", format, "csv | json");

  auto* bench = app.add_subcommand(
      "bench-scaling", "Iterations-to-eps over a (gamma, eps) grid");
  bench->add_option("--grid", grid,
                    "Grid JSON: {L, R, grid:[{gamma, eps}], solvers:[...]}");
  bench->add_option("--out", out, "Output path (default: stdout)");
  bench->add_option("--format", format, "csv | json");

  auto* probe = app.add_subcommand("linesearch-probe",
                                   "Run one binary line search on an instance");
  probe->add_option("--instance", instance, "Instance JSON file or inline JSON")
      ->required();
  probe->add_option("--params", params,
                    "JSON: {x, v, b, c, eps_tilde, L}; x, v scalars or arrays")
      ->required();
  probe->add_option("--out", out, "Output path (default: stdout)");

  auto* verify = app.add_subcommand("verify", "Sampled certificate of an instance");
  verify->add_option("--instance", instance, "Instance JSON file or inline JSON")
      ->required();
  verify->add_option("--seed", seed, "Sampling seed");
  verify->add_option("--samples", samples, "Number of samples");
  verify->add_option("--out", out, "Output path (default: stdout)");

  auto* dump = app.add_subcommand("instance-dump",
                                  "Write a normalized instance spec JSON");
  dump->add_option("--instance", instance, "Instance JSON file or inline JSON")
      ->required();
  dump->add_option("--out", out, "Output path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    const auto fmt = parse_format(format);
    if (!fmt) throw SpecError("format", "must be csv or json");

    if (*solve) {
      RunSpec spec;
      spec.instance = parse_instance_arg(instance);
      const auto kind = parse_solver(solver);
      if (!kind) {
        throw SpecError("solver",
                        "must be agd-strong, agd-nonstrong, gd or regularized");
      }
      spec.solver = *kind;
      spec.epsilon = eps;
      spec.iterations = iters;
      spec.R = R;
      spec.seed = seed;
      spec.out = out;
      spec.format = *fmt;
      return cmd_solve(spec, std::cout, std::cerr);
    }
    if (*bench) {
      const BenchConfig config = grid.empty()
                                     ? default_bench()
                                     : BenchConfig::from_json(read_json_arg(grid, "grid"));
      const BenchResult res = run_bench(config);
      std::ostringstream os;
      if (*fmt == Format::kCsv) {
        write_bench_csv(os, res);
      } else {
        os << bench_to_json(res).dump(1) << '\n';
      }
      emit(out, os.str());
      for (const SlopeFit& s : res.slopes) {
        std::cerr << to_string(s.solver) << " slope vs " << s.against << " = "
                  << s.slope << " (" << s.points << " points)\n";
      }
      return 0;
    }
    if (*probe) {
      const BuiltInstance inst = build_instance(parse_instance_arg(instance));
      if (inst.over_cap) throw SpecError("instance", "exceeds the desk-scale cap");
      const ProbeSpec ps = ProbeSpec::from_json(read_json_arg(params, "params"),
                                                inst.problem.dimension());
      emit(out, linesearch_probe(inst, ps).dump(1) + "\n");
      return 0;
    }
    if (*verify) {
      const BuiltInstance inst = build_instance(parse_instance_arg(instance));
      emit(out, verify_report(inst, seed, samples).dump(1) + "\n");
      return 0;
    }
    if (*dump) {
      const InstanceSpec spec = parse_instance_arg(instance);
      json j = spec.to_json();
      j["derived"] = derived_json(spec);
      emit(out, j.dump(1) + "\n");
      return 0;
    }
  } catch (const SpecError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
