#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "circense/estimator.hpp"
#include "circense/eval.hpp"
#include "circense/selection.hpp"
#include "circense/simulate.hpp"

namespace circense {

/// Wire value of X′ for a censored observation.
inline constexpr double kCensoredSentinel = -kPi;

/// Malformed or inconsistent input. `line()` is 1-based; 0 when the error
/// is not tied to a line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line);
  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Shortest-round-trip is not required; always 17 significant digits,
/// period decimal separator, independent of the global locale.
[[nodiscard]] std::string format_double(double v);

/// Parses a finite decimal number (locale-independent). Throws ParseError.
[[nodiscard]] double parse_double(const std::string& text, std::size_t line = 0);

/// CSV with header `delta,x,l,u`. Censored rows carry x = −π.
[[nodiscard]] CensoredSample read_sample_csv(std::istream& in);
[[nodiscard]] CensoredSample read_sample_csv(const std::filesystem::path& path);
void write_sample_csv(const CensoredSample& sample, std::ostream& out);

/// `resolution` rows `x,density` at x = 2πj/resolution.
void write_density_grid(const DensityEstimate& est, int resolution, std::ostream& out);

/// A leading `# kappa=…,source=…` comment, then columns
/// m,dim,admissible,contrast,op_norm_inv,penalty,chosen.
void write_selection_trace(const SelectionTrace& trace, std::ostream& out);

/// One parsed row of a selection-trace CSV.
struct TraceRow {
  int m = 0;
  int dim = 0;
  bool admissible = false;
  double contrast = 0.0;
  double op_norm_inv = 0.0;
  double penalty = 0.0;
  bool chosen = false;
};

[[nodiscard]] std::vector<TraceRow> read_selection_trace(std::istream& in);

/// Columns scenario,n,N,mise,stderr,censored_frac,mean_dim,failures.
void write_mise_csv(const MiseReport& report, std::ostream& out);

/// Human-readable table for a terminal.
void print_mise_table(const MiseReport& report, std::ostream& out);

/// Columns scenario,n,N,m,dim,mise,stderr,failures.
void write_oracle_scan_csv(const OracleScan& scan, std::ostream& out);

/// A Monte Carlo study described by a `key = value` text file.
///
/// Scenario keys: `model` (model1..model4, or `offset` with `alpha`), or an
/// explicit `target`, `lower`, `upper` (or `offset` = α instead of `upper`).
/// Distributions are written `vonmises(mu, k)`, `uniform_arc(a, b)` or
/// `mixture(w, mu, k; w, mu, k; …)`. Numbers accept `pi` and `+ - * /`,
/// e.g. `2*pi/3`. Study keys: `name`, `n` (comma list), `seed`,
/// `replications`, `grid_cap`, `kappa`, `strategy` (jump | slope).
struct StudyConfig {
  ScenarioSpec scenario;
  std::vector<std::size_t> sample_sizes{50, 100, 500};
  std::size_t replications = 100;
  std::optional<std::uint64_t> seed;
  std::optional<double> kappa;
  int grid_cap = kDefaultGridCap;
  KappaStrategy strategy = KappaStrategy::dimension_jump;
};

[[nodiscard]] StudyConfig parse_study_config(std::istream& in);
[[nodiscard]] StudyConfig load_study_config(const std::filesystem::path& path);

/// Evaluates an arithmetic expression over numbers and `pi`.
[[nodiscard]] double parse_expression(const std::string& text, std::size_t line = 0);

/// Parses a distribution literal such as `vonmises(pi, 1)`.
[[nodiscard]] CircularDistribution parse_distribution(const std::string& text, std::size_t line = 0);

}  // namespace circense
