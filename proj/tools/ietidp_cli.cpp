#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ietidp/bench.hpp"

namespace {

using namespace ietidp;
using namespace ietidp::bench;

constexpr int kSuccess = 0;
constexpr int kSolverFailure = 1;
constexpr int kConfigError = 2;

struct SweepArgs {
  std::string domain = "ring";
  std::string p = "2";
  std::string r = "2";
  std::string alg = "A";
  double tol = 1e-6;
  std::uint64_t seed = 42;
  int max_iter = 1000;
  std::string format = "csv";
  std::string out;
  bool oracle = false;
  double budget = 600.0;
  bool no_caps = false;
};

ExperimentConfig make_config(const SweepArgs& a) {
  ExperimentConfig c;
  c.domain = a.domain;
  c.degrees = parse_range(a.p);
  c.refinements = parse_range(a.r);
  c.algorithms = parse_algorithms(a.alg);
  c.rel_tol = a.tol;
  c.seed = a.seed;
  c.max_iter = a.max_iter;
  c.format = parse_format(a.format);
  c.oracle = a.oracle;
  c.cell_budget_seconds = a.budget;
  c.caps = !a.no_caps;
  c.validate();
  return c;
}

std::string file_stem(const std::string& domain) {
  std::string s = std::filesystem::path(domain).stem().string();
  for (char& ch : s)
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '-' && ch != '_') ch = '_';
  return s.empty() ? "domain" : s;
}

int run_solve(const SweepArgs& args) {
  const ExperimentConfig config = make_config(args);
  const auto tables = run_sweep(config, [&](const ResultTable& t, const Cell& c) {
    std::cerr << "[" << t.domain << " " << algorithm_tag(t.algorithm) << "] r=" << c.r << " p=" << c.p;
    if (c.iterations) std::cerr << " it=" << *c.iterations;
    if (c.kappa) std::cerr << " kappa=" << *c.kappa;
    if (c.oracle_error) std::cerr << " oracle=" << *c.oracle_error;
    if (!c.ok()) std::cerr << " error: " << c.error;
    std::cerr << " (" << c.seconds << " s)\n";
  });

  if (args.out.empty()) {
    std::cout << emit(tables, config.format);
  } else {
    std::filesystem::create_directories(args.out);
    const std::string ext = config.format == OutputFormat::csv ? ".csv" : ".md";
    for (const auto& t : tables) {
      const auto path = std::filesystem::path(args.out) /
                        (file_stem(t.domain) + "_" + algorithm_tag(t.algorithm) + ext);
      std::ofstream f(path);
      f << emit({t}, config.format);
      if (!f) throw std::runtime_error("cannot write " + path.string());
      std::cerr << "wrote " << path.string() << '\n';
    }
  }

  bool failed = false;
  for (const auto& t : tables)
    for (const auto& c : t.cells)
      failed = failed || (!c.ok() && c.error.rfind("skipped", 0) != 0) ||
               (c.oracle_error && *c.oracle_error > 5e-5);
  return failed ? kSolverFailure : kSuccess;
}

int run_check(const SweepArgs& args) {
  const ExperimentConfig config = make_config(args);
  const auto report = cross_check(config);
  std::cout << format_report(report);
  return report.passed ? kSuccess : kSolverFailure;
}

int run_validate(const std::string& file) {
  std::ifstream in(file);
  if (!in) {
    std::cerr << "error: cannot read " << file << '\n';
    return kConfigError;
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  const MultiPatchDomain domain = parse_domain(buffer.str());
  const auto issues = check_domain(domain);
  for (const auto& issue : issues) std::cerr << "error: " << issue << '\n';
  if (!issues.empty()) return kConfigError;
  std::cout << "ok: " << domain.num_patches() << " patches, " << domain.interfaces.size() << " interfaces, "
            << domain.vertices.size() << " vertices, " << domain.boundary_sides.size() << " Dirichlet sides\n";
  return kSuccess;
}

void add_sweep_options(CLI::App* cmd, SweepArgs& a) {
  cmd->add_option("--domain", a.domain, "ring, yeti, grid:MxN or a domain file")->capture_default_str();
  cmd->add_option("--p", a.p, "spline degrees, e.g. 2..4 or 2,3")->capture_default_str();
  cmd->add_option("--r", a.r, "refinement levels, e.g. 2..4")->capture_default_str();
  cmd->add_option("--alg", a.alg, "algorithms, subset of A,B,C")->capture_default_str();
  cmd->add_option("--tol", a.tol, "relative residual reduction")->capture_default_str();
  cmd->add_option("--seed", a.seed, "seed of the random initial guess")->capture_default_str();
  cmd->add_option("--max-iter", a.max_iter, "PCG iteration limit")->capture_default_str();
  cmd->add_option("--budget", a.budget, "wall-time budget per cell in seconds")->capture_default_str();
  cmd->add_flag("--no-caps", a.no_caps, "lift the default r, p caps on ring (6) and yeti (4)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"IETI-DP solver for the Poisson problem on multi-patch spline domains"};
  app.require_subcommand(1);

  SweepArgs solve_args;
  auto* solve_cmd = app.add_subcommand("solve", "run a (p, r, algorithm) sweep and emit tables");
  add_sweep_options(solve_cmd, solve_args);
  solve_cmd->add_option("--format", solve_args.format, "csv or markdown")->capture_default_str();
  solve_cmd->add_option("--out", solve_args.out, "output directory (default: stdout)");
  solve_cmd->add_flag("--oracle", solve_args.oracle, "compare every cell with the global direct solve");

  SweepArgs check_args;
  check_args.domain = "grid:2x2";
  check_args.p = "1..2";
  check_args.r = "1..2";
  check_args.alg = "A,B,C";
  auto* check_cmd = app.add_subcommand("check", "cross-check against the global direct solve");
  add_sweep_options(check_cmd, check_args);

  std::string domain_file;
  auto* validate_cmd = app.add_subcommand("validate", "parse and validate a domain file");
  validate_cmd->add_option("file", domain_file, "domain file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kSuccess : kConfigError;
  }

  try {
    if (*solve_cmd) return run_solve(solve_args);
    if (*check_cmd) return run_check(check_args);
    if (*validate_cmd) return run_validate(domain_file);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ArgumentError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const TopologyError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSolverFailure;
  }
  return kConfigError;
}
