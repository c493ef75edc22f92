#ifndef IETIDP_BENCH_HPP
#define IETIDP_BENCH_HPP

// Experiment sweeps over (p, r, algorithm) and their tabular output.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ietidp/geometry.hpp"
#include "ietidp/ietidp.hpp"

namespace ietidp::bench {

enum class OutputFormat { csv, markdown };

struct ExperimentConfig {
  std::string domain = "ring";  // ring | yeti | grid:MxN | path to a domain file
  std::vector<int> degrees{2};
  std::vector<int> refinements{2};
  std::vector<Algorithm> algorithms{Algorithm::A};
  double rel_tol = 1e-6;
  std::uint64_t seed = 42;
  int max_iter = 1000;
  OutputFormat format = OutputFormat::csv;
  bool oracle = false;
  double cell_budget_seconds = 600.0;
  bool caps = true;  // skip ring cells beyond r, p = 6 and yeti cells beyond r, p = 4

  /// Throws ArgumentError when a range is empty or out of bounds.
  void validate() const;
};

/// "2..4", "1,3,5" or "3". Throws ArgumentError.
std::vector<int> parse_range(std::string_view text);
/// "A,B,C" (case-insensitive). Throws ArgumentError.
std::vector<Algorithm> parse_algorithms(std::string_view text);
OutputFormat parse_format(std::string_view text);

/// Builds the named benchmark domain or reads a domain file.
/// Throws ArgumentError for an unknown name, ParseError/TopologyError for bad files.
MultiPatchDomain resolve_domain(const std::string& name);

/// Geometry and matching checks of a domain; empty when the domain is usable.
std::vector<std::string> check_domain(const MultiPatchDomain& domain);

struct Cell {
  int r = 0;
  int p = 0;
  std::optional<int> iterations;
  std::optional<double> kappa;
  bool converged = false;
  std::optional<double> oracle_error;
  double seconds = 0.0;
  std::string error;  // empty on success

  bool ok() const { return error.empty(); }
};

struct ResultTable {
  std::string domain;
  Algorithm algorithm = Algorithm::A;
  std::uint64_t seed = 0;
  std::vector<int> refinements;  // rows
  std::vector<int> degrees;      // columns
  std::vector<Cell> cells;       // row-major over (r, p)

  const Cell* find(int r, int p) const;
  Cell* find(int r, int p);
};

using ProgressCallback = std::function<void(const ResultTable&, const Cell&)>;

/// One table per algorithm; failed cells carry an error marker instead of aborting the sweep.
std::vector<ResultTable> run_sweep(const ExperimentConfig& config, const ProgressCallback& progress = {});

/// Header `r,p,algorithm,iterations,kappa,seed`; failed cells leave iterations and kappa empty.
std::string emit_csv(const std::vector<ResultTable>& tables);
std::string emit_markdown(const ResultTable& table);
std::string emit(const std::vector<ResultTable>& tables, OutputFormat format);

/// Inverse of emit_csv on the fields the CSV carries. Throws ParseError.
std::vector<ResultTable> parse_csv(std::string_view text);

struct CrossCheckEntry {
  int r = 0;
  int p = 0;
  Algorithm algorithm = Algorithm::A;
  std::optional<double> discrepancy;
  std::string error;
};

struct CrossCheckReport {
  std::vector<CrossCheckEntry> entries;
  double threshold = 5e-5;
  double worst = 0.0;
  bool passed = true;
};

/// Compares every sweep point (r capped at 3) with the global direct solve.
CrossCheckReport cross_check(const ExperimentConfig& config);
std::string format_report(const CrossCheckReport& report);

}  // namespace ietidp::bench

#endif  // IETIDP_BENCH_HPP
