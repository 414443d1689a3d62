#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "circense/basis.hpp"
#include "circense/circle.hpp"

namespace circense {

/// Smallest admissible λ_min/λ_max for a Gram matrix. Below this the model
/// is numerically singular and is excluded from selection.
inline constexpr double kConditionFloor = 1e-12;

/// The Gram system of a model cannot be solved reliably.
class IllConditionedModel : public std::runtime_error {
 public:
  explicit IllConditionedModel(const std::string& what) : std::runtime_error(what) {}
};

/// An immutable sample of censored triplets.
class CensoredSample {
 public:
  explicit CensoredSample(std::vector<CensoredObservation> observations);

  [[nodiscard]] std::size_t size() const noexcept { return observations_.size(); }
  [[nodiscard]] std::span<const CensoredObservation> observations() const noexcept {
    return observations_;
  }
  [[nodiscard]] const CensoredObservation& operator[](std::size_t i) const { return observations_[i]; }
  [[nodiscard]] std::size_t observed_count() const noexcept;
  [[nodiscard]] double censored_fraction() const noexcept;

  [[nodiscard]] bool operator==(const CensoredSample&) const = default;

 private:
  std::vector<CensoredObservation> observations_;
};

struct GramMatrix {
  ModelDim m;
  Eigen::MatrixXd entries;

  /// The Gram matrix of a nested model: its leading D×D block.
  [[nodiscard]] GramMatrix leading(ModelDim sub) const;
};

struct MomentVector {
  ModelDim m;
  Eigen::VectorXd entries;

  [[nodiscard]] MomentVector leading(ModelDim sub) const;
};

struct FourierCoefficients {
  ModelDim m;
  Eigen::VectorXd coeffs;

  /// ‖·‖₂² of the represented function (Parseval).
  [[nodiscard]] double squared_l2_norm() const { return coeffs.squaredNorm(); }
};

/// The truncated projection estimate. A truncated estimate is identically 0.
struct DensityEstimate {
  FourierCoefficients coeffs;
  bool truncated = false;
  double k_n = 0.0;
};

struct Spectrum {
  double min = 0.0;
  double max = 0.0;

  [[nodiscard]] bool admissible() const noexcept {
    return max > 0.0 && min >= kConditionFloor * max;
  }
};

/// Smallest and largest eigenvalue of a symmetric matrix.
[[nodiscard]] Spectrum spectrum(const GramMatrix& gram);

/// Fraction of observation windows that contain x.
[[nodiscard]] double empirical_sigma(const CensoredSample& sample, Angle x);

/// Mean over observations of the basis products integrated over each window.
[[nodiscard]] GramMatrix build_gram(const CensoredSample& sample, ModelDim m);

/// Population Gram matrix ∫ φ_λ φ_λ' σ over the circle for a known coverage
/// function σ, by periodic trapezoid quadrature. Simulation oracle only.
[[nodiscard]] GramMatrix population_gram(const std::function<double(double)>& sigma, ModelDim m,
                                         int nodes = 4096);

/// (1/n) Σ Δ_i φ_λ(X_i). Censored observations contribute nothing; their
/// angle is never evaluated.
[[nodiscard]] MomentVector build_moments(const CensoredSample& sample, ModelDim m);

/// Solves Ĝ Â = Û by Cholesky. Throws IllConditionedModel when
/// λ_min < 1e-12 λ_max or the residual check fails.
[[nodiscard]] FourierCoefficients solve_coefficients(const GramMatrix& gram,
                                                     const MomentVector& moments);

/// Contrast at the minimiser: −Σ â_λ û_λ.
[[nodiscard]] double contrast_value(const FourierCoefficients& coeffs, const MomentVector& moments);

/// Zeroes the estimate when Σ â² > n².
[[nodiscard]] DensityEstimate truncate_estimate(const FourierCoefficients& coeffs, std::size_t n);

/// Σ â_λ φ_λ(x), or 0 for a truncated estimate. Can be negative.
[[nodiscard]] double evaluate_density(const DensityEstimate& est, Angle x);

/// Convenience: wraps raw coefficients as an untruncated estimate.
[[nodiscard]] DensityEstimate make_estimate(std::span<const double> coeffs);

}  // namespace circense
