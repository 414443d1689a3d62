#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "circense/estimator.hpp"
#include "circense/selection.hpp"
#include "circense/simulate.hpp"

namespace circense {

/// Node count of the periodic trapezoid rule used for every integral here.
inline constexpr int kQuadratureNodes = 4096;

/// ∫₀^{2π} g by the composite trapezoid rule on `nodes` equispaced points.
[[nodiscard]] double trapezoid(const std::function<double(double)>& g, int nodes = kQuadratureNodes);

/// ∫ (f̃ − f)² over the circle.
[[nodiscard]] double integrated_squared_error(const std::function<double(double)>& estimate,
                                              const CircularDistribution& truth);
[[nodiscard]] double integrated_squared_error(const DensityEstimate& est,
                                              const CircularDistribution& truth);

/// Order-independent mean: sorts, then Neumaier-compensated summation.
[[nodiscard]] double stable_mean(std::vector<double> values);

/// Output of an estimator on one replication.
struct ReplicationFit {
  std::function<double(double)> density;
  int dimension = 0;  ///< selected D_m (0 when not meaningful)
};

/// Any estimator that can be scored by the Monte Carlo harness. It may throw
/// EstimationImpossible, which is counted as a failed replication.
using Estimator = std::function<ReplicationFit(const CensoredSample&)>;

/// The adaptive projection estimator with the given options.
[[nodiscard]] Estimator adaptive_estimator(AdaptiveOptions options = {});

struct MiseRow {
  std::size_t n = 0;
  std::size_t replications = 0;
  double mise = 0.0;
  double std_error = 0.0;
  double censored_fraction = 0.0;
  double mean_dim = 0.0;
  std::size_t failures = 0;
  std::vector<double> ise;  ///< per replication, NaN for failures
};

struct MiseReport {
  std::string scenario;
  std::vector<MiseRow> rows;
};

struct MiseOptions {
  std::vector<std::size_t> sample_sizes;
  std::size_t replications = 100;
  std::uint64_t seed = 1;
  unsigned jobs = 0;  ///< 0 = hardware concurrency
};

/// Stream id of replication `rep` at sample size `n`. Shared by run_mise and
/// fixed_m_oracle_scan so both see the same samples.
[[nodiscard]] std::uint64_t replication_stream(std::size_t n, std::size_t rep);

/// Runs `body(i)` for i in [0, count) on up to `jobs` threads.
void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& body);

/// Monte Carlo MISE of `estimator` (default: adaptive) on `spec`.
/// Throws DomainError when replications < 2 or no sample sizes are given.
[[nodiscard]] MiseReport run_mise(const ScenarioSpec& spec, const MiseOptions& options,
                                  const Estimator& estimator = adaptive_estimator());

struct FixedModelRow {
  ModelDim m;
  double mise = 0.0;
  double std_error = 0.0;
  std::size_t failures = 0;
};

struct OracleScan {
  std::string scenario;
  std::size_t n = 0;
  std::size_t replications = 0;
  std::vector<FixedModelRow> rows;

  [[nodiscard]] const FixedModelRow& best() const;
};

/// MISE of the truncated estimator at every fixed m of the grid.
[[nodiscard]] OracleScan fixed_m_oracle_scan(const ScenarioSpec& spec, std::size_t n,
                                             std::size_t replications, int grid_cap,
                                             std::uint64_t seed, unsigned jobs = 0);

/// The estimate cannot be summarised (it is truncated to zero).
class NoFitError : public std::runtime_error {
 public:
  explicit NoFitError(const std::string& what) : std::runtime_error(what) {}
};

struct VonMisesFit {
  Angle mu;
  double kappa = 0.0;
  double mean_resultant_length = 0.0;
  bool flat = false;  ///< no preferred direction; mu reported as 0
};

/// Moment-matching Von Mises summary of a density estimate: direction from
/// the first trigonometric moment, concentration from A₁(k) = R̄.
[[nodiscard]] VonMisesFit fit_von_mises(const DensityEstimate& est);

}  // namespace circense
