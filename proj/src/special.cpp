#include "circense/special.hpp"

#include <cmath>

#include "circense/circle.hpp"

namespace circense {

namespace {

constexpr double kSeriesLimit = 50.0;

// Σ (x/2)^{2j+ν} / (j! (j+ν)!) for ν ∈ {0, 1}; all terms positive.
double series(double x, int nu) {
  const double q = 0.25 * x * x;
  double term = nu == 0 ? 1.0 : 0.5 * x;
  double sum = term;
  for (int j = 1; j < 500; ++j) {
    term *= q / (static_cast<double>(j) * static_cast<double>(j + nu));
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum;
}

// e^{-x} I_ν(x) ~ (2πx)^{-1/2} Σ (−1)^k a_k(ν) / x^k.
double scaled_asymptotic(double x, int nu) {
  const double mu = 4.0 * nu * nu;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 30; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = -term * (mu - odd * odd) / (k * 8.0 * x);
    if (std::abs(next) > std::abs(term)) break;
    term = next;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum / std::sqrt(kTwoPi * x);
}

double check(double x) {
  if (!std::isfinite(x)) throw DomainError("Bessel argument must be finite");
  return std::abs(x);
}

}  // namespace

double bessel_i0(double x) {
  const double ax = check(x);
  if (ax <= kSeriesLimit) return series(ax, 0);
  return std::exp(ax) * scaled_asymptotic(ax, 0);
}

double bessel_i1(double x) {
  const double ax = check(x);
  const double v = ax <= kSeriesLimit ? series(ax, 1) : std::exp(ax) * scaled_asymptotic(ax, 1);
  return x < 0.0 ? -v : v;
}

double bessel_ratio_a1(double k) {
  const double ak = check(k);
  const double r = ak <= kSeriesLimit ? series(ak, 1) / series(ak, 0)
                                      : scaled_asymptotic(ak, 1) / scaled_asymptotic(ak, 0);
  return k < 0.0 ? -r : r;
}

double inverse_bessel_ratio_a1(double rbar, double k_max) {
  if (!std::isfinite(rbar)) throw DomainError("mean resultant length must be finite");
  if (rbar <= 0.0) return 0.0;
  if (rbar >= bessel_ratio_a1(k_max)) return k_max;

  double lo = 0.0;
  double hi = 1.0;
  while (bessel_ratio_a1(hi) < rbar) {
    lo = hi;
    hi *= 2.0;
  }
  // A₁ is increasing; bisection brings us into Newton's basin.
  for (int i = 0; i < 60 && hi - lo > 1e-6 * (1.0 + hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    (bessel_ratio_a1(mid) < rbar ? lo : hi) = mid;
  }
  double k = 0.5 * (lo + hi);
  for (int i = 0; i < 50; ++i) {
    const double a = bessel_ratio_a1(k);
    // A₁'(k) = 1 − A₁/k − A₁²
    const double deriv = k > 0.0 ? 1.0 - a / k - a * a : 0.5;
    if (!(deriv > 0.0)) break;
    double step = (a - rbar) / deriv;
    double next = k - step;
    if (next <= lo || next >= hi) next = 0.5 * (lo + hi);
    (bessel_ratio_a1(next) < rbar ? lo : hi) = next;
    step = std::abs(next - k);
    k = next;
    if (step < 1e-12 * (1.0 + k)) break;
  }
  return k;
}

}  // namespace circense
