#pragma once

#include <cstddef>
#include <vector>

#include "circense/circle.hpp"

namespace circense {

/// Largest model index m the library will assemble (D_m = 129).
inline constexpr int kMaxModel = 64;

enum class BasisKind { constant, cosine, sine };

/// Index λ into the trigonometric basis:
///   λ = 0      → 1/√(2π)
///   λ = 2j − 1 → cos(j x)/√π
///   λ = 2j     → sin(j x)/√π
class BasisIndex {
 public:
  explicit BasisIndex(int lambda);

  [[nodiscard]] int lambda() const noexcept { return lambda_; }
  [[nodiscard]] int frequency() const noexcept { return (lambda_ + 1) / 2; }
  [[nodiscard]] BasisKind kind() const noexcept {
    if (lambda_ == 0) return BasisKind::constant;
    return (lambda_ % 2 == 1) ? BasisKind::cosine : BasisKind::sine;
  }

 private:
  int lambda_;
};

/// Sieve index m; the model space holds frequencies 0..m and has
/// dimension D_m = 2m + 1.
class ModelDim {
 public:
  explicit ModelDim(int m);

  [[nodiscard]] int m() const noexcept { return m_; }
  [[nodiscard]] int dim() const noexcept { return 2 * m_ + 1; }
  [[nodiscard]] bool operator==(const ModelDim&) const noexcept = default;

 private:
  int m_;
};

[[nodiscard]] double basis_eval(BasisIndex idx, Angle x) noexcept;

/// All basis values φ_0(x), …, φ_{D−1}(x).
[[nodiscard]] std::vector<double> basis_vector(ModelDim m, Angle x);

/// ∫ cos(f x) dx and ∫ sin(f x) dx over an arc for f = 0..max_frequency.
///
/// Every product of two basis functions reduces to a combination of these
/// integrals, so an arc's full Gram contribution costs O(max_frequency)
/// trigonometric evaluations.
struct ArcTrigIntegrals {
  std::vector<double> cos_int;
  std::vector<double> sin_int;

  ArcTrigIntegrals() = default;
  ArcTrigIntegrals(const CircularArc& arc, int max_frequency);

  /// Zero integrals, for accumulating averages over many arcs.
  static ArcTrigIntegrals zeros(int max_frequency);

  [[nodiscard]] int max_frequency() const noexcept {
    return static_cast<int>(cos_int.size()) - 1;
  }

  void accumulate(const ArcTrigIntegrals& other);
  void scale(double factor);
};

/// ∫_arc φ_a φ_b dx from precomputed trig integrals. Requires
/// integrals.max_frequency() ≥ freq(a) + freq(b).
[[nodiscard]] double product_integral(BasisIndex a, BasisIndex b,
                                      const ArcTrigIntegrals& integrals) noexcept;

/// Exact ∫_arc φ_a(x) φ_b(x) dx by product-to-sum antiderivatives.
[[nodiscard]] double arc_inner_product(BasisIndex a, BasisIndex b, const CircularArc& arc);

}  // namespace circense
