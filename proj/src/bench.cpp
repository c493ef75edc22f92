#include "ietidp/bench.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace ietidp::bench {

namespace {

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
std::optional<T> to_number(std::string_view s) {
  T value{};
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || end != s.data() + s.size()) return std::nullopt;
  return value;
}

int to_int(std::string_view s, std::string_view what) {
  const auto v = to_number<int>(s);
  if (!v) throw ArgumentError("invalid integer '" + std::string(s) + "' in " + std::string(what));
  return *v;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double relative_discrepancy(const MultiPatchDomain& domain, int p, int r, const std::vector<Eigen::VectorXd>& u,
                            const std::vector<Eigen::VectorXd>& reference) {
  const auto spaces = analysis_spaces(domain, p, r);
  const auto discs = classify_domain(domain, spaces);
  std::vector<PatchSystem> systems;
  systems.reserve(discs.size());
  for (int k = 0; k < domain.num_patches(); ++k)
    systems.push_back(assemble_stiffness(discs[k], domain.patches[k], std::nullopt, k));
  return relative_energy_error(discs, systems, u, reference);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (degrees.empty()) throw ArgumentError("degree range is empty");
  if (refinements.empty()) throw ArgumentError("refinement range is empty");
  if (algorithms.empty()) throw ArgumentError("algorithm set is empty");
  for (int p : degrees)
    if (p < 1) throw ArgumentError("degree must be at least 1 (got " + std::to_string(p) + ")");
  for (int r : refinements)
    if (r < 0) throw ArgumentError("refinement level must be nonnegative (got " + std::to_string(r) + ")");
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw ArgumentError("tolerance must lie in (0,1)");
  if (max_iter < 1) throw ArgumentError("max_iter must be positive");
  if (!(cell_budget_seconds > 0.0)) throw ArgumentError("cell time budget must be positive");
}

std::vector<int> parse_range(std::string_view text) {
  const std::string s = trim(text);
  if (s.empty()) throw ArgumentError("empty range");
  std::vector<int> out;
  if (const auto dots = s.find(".."); dots != std::string::npos) {
    const int lo = to_int(trim(std::string_view(s).substr(0, dots)), "range");
    const int hi = to_int(trim(std::string_view(s).substr(dots + 2)), "range");
    if (hi < lo) throw ArgumentError("range " + s + " is empty");
    for (int v = lo; v <= hi; ++v) out.push_back(v);
    return out;
  }
  for (const auto& item : split(s, ',')) {
    const int v = to_int(item, "list");
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Algorithm> parse_algorithms(std::string_view text) {
  std::vector<Algorithm> out;
  for (const auto& item : split(text, ',')) {
    const auto a = algorithm_from_tag(item);
    if (!a) throw ArgumentError("unknown algorithm '" + item + "' (expected A, B or C)");
    if (std::find(out.begin(), out.end(), *a) == out.end()) out.push_back(*a);
  }
  return out;
}

OutputFormat parse_format(std::string_view text) {
  if (text == "csv") return OutputFormat::csv;
  if (text == "markdown" || text == "md") return OutputFormat::markdown;
  throw ArgumentError("unknown output format '" + std::string(text) + "' (expected csv or markdown)");
}

MultiPatchDomain resolve_domain(const std::string& name) {
  if (name == "ring") return build_ring();
  if (name == "yeti") return build_yeti();
  if (name.rfind("grid:", 0) == 0) {
    const auto spec = std::string_view(name).substr(5);
    const auto x = spec.find('x');
    if (x == std::string_view::npos) throw ArgumentError("grid domain must read grid:MxN");
    const int m = to_int(spec.substr(0, x), "grid size");
    const int n = to_int(spec.substr(x + 1), "grid size");
    if (m < 1 || n < 1) throw ArgumentError("grid dimensions must be positive");
    return build_unit_square_grid(m, n);
  }
  std::ifstream in(name);
  if (!in) throw ArgumentError("unknown domain '" + name + "' (not ring, yeti, grid:MxN or a readable file)");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_domain(buffer.str());
}

std::vector<std::string> check_domain(const MultiPatchDomain& domain) {
  std::vector<std::string> issues;
  constexpr int samples = 9;
  for (int k = 0; k < domain.num_patches(); ++k) {
    bool bad = false;
    for (int j = 0; j < samples && !bad; ++j)
      for (int i = 0; i < samples && !bad; ++i) {
        const double u = (i + 0.5) / samples, v = (j + 0.5) / samples;
        if (!(map_jacobian(domain.patches[k], u, v).determinant() > 0.0)) {
          issues.push_back("patch " + std::to_string(k) + ": Jacobian determinant is not positive at (" +
                           format_double(u) + ", " + format_double(v) + ")");
          bad = true;
        }
      }
  }
  const auto report = validate_matching(domain, analysis_spaces(domain, 1, 0));
  if (!report.ok) issues.push_back(report.message);
  return issues;
}

const Cell* ResultTable::find(int r, int p) const {
  for (const auto& c : cells)
    if (c.r == r && c.p == p) return &c;
  return nullptr;
}

Cell* ResultTable::find(int r, int p) {
  return const_cast<Cell*>(static_cast<const ResultTable&>(*this).find(r, p));
}

namespace {

// Largest (r, p) a sweep visits on the benchmark domains unless caps are lifted.
std::optional<std::pair<int, int>> desk_cap(const ExperimentConfig& config) {
  if (!config.caps) return std::nullopt;
  if (config.domain == "ring") return std::make_pair(6, 6);
  if (config.domain == "yeti") return std::make_pair(4, 4);
  return std::nullopt;
}

}  // namespace

std::vector<ResultTable> run_sweep(const ExperimentConfig& config, const ProgressCallback& progress) {
  config.validate();
  const MultiPatchDomain domain = resolve_domain(config.domain);

  std::vector<ResultTable> tables;
  for (Algorithm alg : config.algorithms) {
    ResultTable t;
    t.domain = config.domain;
    t.algorithm = alg;
    t.seed = config.seed;
    t.refinements = config.refinements;
    t.degrees = config.degrees;
    tables.push_back(std::move(t));
  }

  for (int r : config.refinements) {
    for (int p : config.degrees) {
      std::optional<std::vector<Eigen::VectorXd>> reference;
      std::string reference_error;
      for (auto& table : tables) {
        Cell cell;
        cell.r = r;
        cell.p = p;
        const auto t0 = std::chrono::steady_clock::now();
        try {
          if (const auto cap = desk_cap(config); cap && (r > cap->first || p > cap->second))
            throw TimeBudgetExceeded("beyond the default cap r <= " + std::to_string(cap->first) +
                                     ", p <= " + std::to_string(cap->second) + " for " + config.domain);
          SolveOptions opts;
          opts.degree = p;
          opts.refinements = r;
          opts.algorithm = table.algorithm;
          opts.rel_tol = config.rel_tol;
          opts.seed = config.seed;
          opts.max_iter = config.max_iter;
          opts.time_budget_seconds = config.cell_budget_seconds;
          const auto result = solve(domain, opts);
          cell.iterations = result.report.iterations;
          cell.kappa = result.report.kappa;
          cell.converged = result.report.converged;
          if (!cell.converged)
            cell.error = "not converged after " + std::to_string(result.report.iterations) + " iterations";
          if (config.oracle && cell.converged) {
            if (!reference && reference_error.empty()) {
              try {
                reference = solve_global_oracle(domain, p, r);
              } catch (const std::exception& e) {
                reference_error = e.what();
              }
            }
            if (reference)
              cell.oracle_error = relative_discrepancy(domain, p, r, result.coefficients, *reference);
            else
              cell.error = "oracle failed: " + reference_error;
          }
        } catch (const TimeBudgetExceeded& e) {
          cell.error = std::string("skipped: ") + e.what();
        } catch (const std::exception& e) {
          cell.error = e.what();
        }
        cell.seconds = seconds_since(t0);
        table.cells.push_back(cell);
        if (progress) progress(table, table.cells.back());
      }
    }
  }
  return tables;
}

std::string emit_csv(const std::vector<ResultTable>& tables) {
  std::ostringstream out;
  out << "r,p,algorithm,iterations,kappa,seed\n";
  for (const auto& t : tables) {
    for (const auto& c : t.cells) {
      out << c.r << ',' << c.p << ',' << algorithm_tag(t.algorithm) << ',';
      if (c.ok() && c.iterations) out << *c.iterations;
      out << ',';
      if (c.ok() && c.kappa) out << format_double(*c.kappa);
      out << ',' << t.seed << '\n';
    }
  }
  return out.str();
}

std::string emit_markdown(const ResultTable& table) {
  std::ostringstream out;
  out << "Domain " << table.domain << ", Algorithm " << algorithm_tag(table.algorithm) << ", seed "
      << table.seed << ". Cells: iterations / condition number.\n\n";
  out << "| r\\p |";
  for (int p : table.degrees) out << ' ' << p << " |";
  out << "\n|---|";
  for (std::size_t i = 0; i < table.degrees.size(); ++i) out << "---|";
  out << '\n';
  for (int r : table.refinements) {
    out << "| " << r << " |";
    for (int p : table.degrees) {
      const Cell* c = table.find(r, p);
      out << ' ';
      if (!c) {
        out << '-';
      } else if (c->iterations && c->kappa) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%d / %.2f", *c->iterations, *c->kappa);
        out << buf;
        if (!c->ok()) out << " (fail)";
      } else {
        out << (c->error.rfind("skipped", 0) == 0 ? "skipped" : "fail");
      }
      out << " |";
    }
    out << '\n';
  }
  return out.str();
}

std::string emit(const std::vector<ResultTable>& tables, OutputFormat format) {
  if (format == OutputFormat::csv) return emit_csv(tables);
  std::string out;
  for (std::size_t i = 0; i < tables.size(); ++i) {
    if (i > 0) out += '\n';
    out += emit_markdown(tables[i]);
  }
  return out;
}

std::vector<ResultTable> parse_csv(std::string_view text) {
  std::vector<ResultTable> tables;
  std::map<std::pair<int, std::uint64_t>, std::size_t> index;  // (algorithm, seed) -> table
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    if (!header_seen) {
      if (line != "r,p,algorithm,iterations,kappa,seed")
        throw ParseError("expected header r,p,algorithm,iterations,kappa,seed", line_no, 1);
      header_seen = true;
      continue;
    }
    const auto fields = split(line, ',');
    if (fields.size() != 6) throw ParseError("expected 6 fields", line_no, 1);
    auto column_of = [&](std::size_t f) {
      int col = 1;
      for (std::size_t i = 0; i < f; ++i) col += static_cast<int>(fields[i].size()) + 1;
      return col;
    };
    auto need = [&](std::size_t f, auto value, const char* what) {
      if (!value) throw ParseError(std::string("invalid ") + what + " '" + fields[f] + "'", line_no, column_of(f));
      return *value;
    };
    Cell cell;
    cell.r = need(0, to_number<int>(fields[0]), "r");
    cell.p = need(1, to_number<int>(fields[1]), "p");
    const Algorithm alg = need(2, algorithm_from_tag(fields[2]), "algorithm");
    if (!fields[3].empty()) cell.iterations = need(3, to_number<int>(fields[3]), "iteration count");
    if (!fields[4].empty()) cell.kappa = need(4, to_number<double>(fields[4]), "condition number");
    const auto seed = need(5, to_number<std::uint64_t>(fields[5]), "seed");
    cell.converged = cell.iterations.has_value();
    if (!cell.iterations || !cell.kappa) cell.error = "failed";

    const auto key = std::make_pair(static_cast<int>(alg), seed);
    auto it = index.find(key);
    if (it == index.end()) {
      ResultTable t;
      t.algorithm = alg;
      t.seed = seed;
      tables.push_back(std::move(t));
      it = index.emplace(key, tables.size() - 1).first;
    }
    auto& t = tables[it->second];
    if (std::find(t.refinements.begin(), t.refinements.end(), cell.r) == t.refinements.end())
      t.refinements.push_back(cell.r);
    if (std::find(t.degrees.begin(), t.degrees.end(), cell.p) == t.degrees.end()) t.degrees.push_back(cell.p);
    t.cells.push_back(cell);
  }
  if (!header_seen) throw ParseError("missing header", std::max(line_no, 1), 1);
  return tables;
}

CrossCheckReport cross_check(const ExperimentConfig& config) {
  config.validate();
  const MultiPatchDomain domain = resolve_domain(config.domain);
  CrossCheckReport report;
  for (int r : config.refinements) {
    if (r > 3) continue;
    for (int p : config.degrees) {
      const auto matching = validate_matching(domain, analysis_spaces(domain, p, r));
      std::optional<std::vector<Eigen::VectorXd>> reference;
      std::string failure;
      if (!matching.ok) {
        failure = "matching validation failed: " + matching.message;
      } else {
        try {
          reference = solve_global_oracle(domain, p, r);
        } catch (const std::exception& e) {
          failure = std::string("oracle failed: ") + e.what();
        }
      }
      for (Algorithm alg : config.algorithms) {
        CrossCheckEntry entry;
        entry.r = r;
        entry.p = p;
        entry.algorithm = alg;
        if (!reference) {
          entry.error = failure;
        } else {
          try {
            SolveOptions opts;
            opts.degree = p;
            opts.refinements = r;
            opts.algorithm = alg;
            opts.rel_tol = config.rel_tol;
            opts.seed = config.seed;
            opts.max_iter = config.max_iter;
            opts.time_budget_seconds = config.cell_budget_seconds;
            const auto result = solve(domain, opts);
            if (!result.report.converged) entry.error = "not converged";
            entry.discrepancy = relative_discrepancy(domain, p, r, result.coefficients, *reference);
          } catch (const std::exception& e) {
            entry.error = e.what();
          }
        }
        if (!entry.error.empty() || !entry.discrepancy || !(*entry.discrepancy <= report.threshold))
          report.passed = false;
        if (entry.discrepancy) report.worst = std::max(report.worst, *entry.discrepancy);
        report.entries.push_back(std::move(entry));
      }
    }
  }
  if (report.entries.empty()) report.passed = false;
  return report;
}

std::string format_report(const CrossCheckReport& report) {
  std::ostringstream out;
  out << "r,p,algorithm,discrepancy,status\n";
  for (const auto& e : report.entries) {
    out << e.r << ',' << e.p << ',' << algorithm_tag(e.algorithm) << ',';
    if (e.discrepancy) out << format_double(*e.discrepancy);
    out << ',';
    if (!e.error.empty())
      out << "error: " << e.error;
    else
      out << (*e.discrepancy <= report.threshold ? "ok" : "exceeds threshold");
    out << '\n';
  }
  out << (report.passed ? "PASS" : "FAIL") << ": worst discrepancy " << format_double(report.worst)
      << " (threshold " << format_double(report.threshold) << ")\n";
  return out.str();
}

}  // namespace ietidp::bench
