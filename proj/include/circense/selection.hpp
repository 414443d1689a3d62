#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "circense/estimator.hpp"

namespace circense {

inline constexpr int kDefaultGridCap = 25;

/// κ used when there are too few admissible models to calibrate from.
inline constexpr double kFallbackKappa = 32.0;

/// Minimum number of admissible models required by calibrate_kappa.
inline constexpr std::size_t kMinCalibrationModels = 8;

/// No model on the grid has a usable Gram matrix.
class EstimationImpossible : public std::runtime_error {
 public:
  explicit EstimationImpossible(const std::string& what) : std::runtime_error(what) {}
};

/// The candidate models {1, …, min(⌊n/2⌋ − 1, cap)}.
struct ModelGrid {
  std::size_t n = 0;
  std::vector<ModelDim> models;

  /// Throws DomainError when n < 4 (the grid would be empty) or cap < 1.
  static ModelGrid for_sample_size(std::size_t n, int cap = kDefaultGridCap);

  [[nodiscard]] ModelDim largest() const { return models.back(); }
};

/// Everything computed for one model of the grid.
struct ModelRecord {
  ModelDim m;
  bool admissible = false;
  double contrast = 0.0;       ///< ζ(f̊_m) = −ÂᵀÛ; NaN when inadmissible
  double op_norm_inv = 0.0;    ///< ‖Ĝ_m⁻¹‖_op; NaN when inadmissible
  double penalty_shape = 0.0;  ///< ‖Ĝ_m⁻¹‖_op D_m / (2πn); NaN when inadmissible
  double penalty = 0.0;        ///< κ · penalty_shape
  std::optional<FourierCoefficients> coeffs;
};

enum class KappaStrategy {
  /// Largest jump of the selected dimension along the exact κ path; κ̂ = 2 κ_jump.
  dimension_jump,
  /// Least-squares slope of −ζ against the penalty shape over the largest
  /// third of models; κ̂ = 2 · slope.
  slope_regression,
};

enum class KappaSource { user, calibrated, fallback };

struct CalibrationOptions {
  KappaStrategy strategy = KappaStrategy::dimension_jump;
  /// Lower clamp for κ̂. Defaults to 0.05 (dimension jump) or 1 (regression).
  std::optional<double> min_kappa;
  double max_kappa = 1e4;
  /// Fraction of the largest admissible models used by slope_regression.
  double regression_fraction = 1.0 / 3.0;

  [[nodiscard]] double lower_clamp() const;
};

struct KappaCalibration {
  double kappa = kFallbackKappa;
  KappaSource source = KappaSource::fallback;
};

struct SelectionTrace {
  std::size_t n = 0;
  std::vector<ModelRecord> records;
  ModelDim chosen{1};
  double kappa = 0.0;
  KappaSource kappa_source = KappaSource::user;

  [[nodiscard]] const ModelRecord& chosen_record() const;
  /// Penalised criterion ζ + pen for a record (NaN if inadmissible).
  [[nodiscard]] static double criterion(const ModelRecord& r) { return r.contrast + r.penalty; }
};

/// 1 / λ_min(Ĝ). Throws IllConditionedModel for an inadmissible Gram.
[[nodiscard]] double inverse_op_norm(const GramMatrix& gram);

/// ‖Ĝ_m⁻¹‖_op D_m / (2πn): the penalty without κ.
[[nodiscard]] double penalty_shape(ModelDim m, std::size_t n, double op_norm_inv);

/// κ ‖Ĝ_m⁻¹‖_op D_m / (2πn).
[[nodiscard]] double penalty(ModelDim m, std::size_t n, double op_norm_inv, double kappa);

/// Fits every model on the grid (contrast, operator norm, coefficients).
/// Penalties are left at zero. The largest Gram matrix is assembled once and
/// nested models use its leading blocks.
[[nodiscard]] std::vector<ModelRecord> fit_models(const CensoredSample& sample,
                                                  const ModelGrid& grid);

/// argmin over admissible records of ζ + κ · shape; ties go to the smallest m.
/// Throws EstimationImpossible when no record is admissible.
[[nodiscard]] SelectionTrace select_from_records(std::vector<ModelRecord> records, std::size_t n,
                                                 double kappa,
                                                 KappaSource source = KappaSource::user);

[[nodiscard]] SelectionTrace select_model(const CensoredSample& sample, const ModelGrid& grid,
                                          double kappa);

/// Slope-heuristic calibration of κ from one sample's model table.
[[nodiscard]] KappaCalibration calibrate_kappa(std::span<const ModelRecord> records,
                                               const CalibrationOptions& options = {});

struct AdaptiveOptions {
  int grid_cap = kDefaultGridCap;
  std::optional<double> kappa;  ///< overrides calibration when set
  CalibrationOptions calibration;
};

struct AdaptiveFit {
  SelectionTrace trace;
  DensityEstimate estimate;
};

/// Full pipeline: fit the grid, calibrate or take κ, select, truncate.
[[nodiscard]] AdaptiveFit estimate_adaptive(const CensoredSample& sample,
                                            const AdaptiveOptions& options = {});

[[nodiscard]] std::string to_string(KappaStrategy s);
[[nodiscard]] std::string to_string(KappaSource s);
[[nodiscard]] KappaStrategy parse_kappa_strategy(const std::string& text);

}  // namespace circense
