#pragma once

namespace circense {

/// Modified Bessel function of the first kind, order 0.
/// Power series for x ≤ 50, asymptotic expansion above.
[[nodiscard]] double bessel_i0(double x);

/// Modified Bessel function of the first kind, order 1.
[[nodiscard]] double bessel_i1(double x);

/// A₁(k) = I₁(k)/I₀(k), the mean resultant length of M(μ, k).
/// Stable for large k (no overflow).
[[nodiscard]] double bessel_ratio_a1(double k);

/// Inverse of A₁ on [0, 1): the concentration whose mean resultant length is
/// `rbar`. Bisection followed by Newton polishing to 1e-10. Returns 0 for
/// rbar ≤ 0 and `k_max` when rbar exceeds A₁(k_max).
[[nodiscard]] double inverse_bessel_ratio_a1(double rbar, double k_max = 1e4);

}  // namespace circense
