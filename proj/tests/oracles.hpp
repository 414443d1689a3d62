#pragma once

// Independent reference computations. Nothing here calls the library code
// it is used to check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "circense/circle.hpp"
#include "circense/estimator.hpp"

namespace oracle {

inline constexpr double kPi = std::numbers::pi;

// Plain basis, written out from the definition.
inline double phi(int lambda, double x) {
  if (lambda == 0) return 1.0 / std::sqrt(2.0 * kPi);
  const int j = (lambda + 1) / 2;
  return (lambda % 2 == 1 ? std::cos(j * x) : std::sin(j * x)) / std::sqrt(kPi);
}

// Composite trapezoid over [a, b]. Endpoints weighted by 1/2.
inline double trapezoid(const std::function<double(double)>& g, double a, double b, int nodes) {
  const double h = (b - a) / nodes;
  double s = 0.5 * (g(a) + g(b));
  for (int i = 1; i < nodes; ++i) s += g(a + h * i);
  return s * h;
}

// Gauss–Legendre nodes and weights on [−1, 1] by Newton on P_n.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline GaussRule gauss_legendre(int n) {
  GaussRule r{std::vector<double>(n), std::vector<double>(n)};
  for (int i = 0; i < n; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    r.nodes[i] = x;
    r.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

// Composite Gauss–Legendre over [a, b]: `panels` panels of `order` nodes.
inline double gauss_quadrature(const std::function<double(double)>& g, double a, double b, int panels = 256,
                               int order = 16) {
  static const GaussRule rule = gauss_legendre(16);
  const GaussRule& r = order == 16 ? rule : gauss_legendre(order);
  const double h = (b - a) / panels;
  double s = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + h * (p + 0.5);
    for (int i = 0; i < order; ++i) s += r.weights[i] * g(mid + 0.5 * h * r.nodes[i]);
  }
  return 0.5 * h * s;
}

// Same over an anticlockwise arc; the panels are shared between both pieces
// of a wrapped arc in proportion to their lengths.
inline double arc_gauss(const std::function<double(double)>& g, double s, double e, int panels = 256) {
  if (s <= e) return gauss_quadrature(g, s, e, panels);
  const double first = 2.0 * kPi - s;
  const double total = first + e;
  const int p1 = std::clamp(static_cast<int>(std::lround(panels * first / total)), 1, panels - 1);
  return gauss_quadrature(g, s, 2.0 * kPi, p1) + gauss_quadrature(g, 0.0, e, panels - p1);
}

// Gaussian elimination with partial pivoting on a copy.
inline std::vector<double> gauss_solve(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    }
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    if (a[c][c] == 0.0) throw std::runtime_error("singular");
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
    x[i] = s / a[i][i];
  }
  return x;
}

inline std::vector<std::vector<double>> to_rows(const Eigen::MatrixXd& m) {
  std::vector<std::vector<double>> rows(m.rows(), std::vector<double>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) rows[i][j] = m(i, j);
  return rows;
}

// Largest eigenvalue of A⁻¹ (= 1/λ_min(A)) by inverse power iteration, each
// step solved by gauss_solve.
inline double inverse_power_iteration(const Eigen::MatrixXd& a, int iterations = 2000) {
  const auto rows = to_rows(a);
  std::vector<double> v(a.rows(), 1.0);
  v[0] = 1.3;  // break symmetry with any eigenvector orthogonal to 1
  double rayleigh = 0.0;
  for (int it = 0; it < iterations; ++it) {
    std::vector<double> w = gauss_solve(rows, v);
    double norm = 0.0;
    for (double x : w) norm += x * x;
    norm = std::sqrt(norm);
    double dot = 0.0;
    double vv = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      dot += v[i] * w[i];
      vv += v[i] * v[i];
    }
    rayleigh = dot / vv;
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = w[i] / norm;
  }
  return rayleigh;
}

// I_ν(x) for ν ∈ {0, 1} by a fixed number of series terms.
inline double bessel_series(int nu, double x, int terms = 60) {
  double term = nu == 0 ? 1.0 : x / 2.0;
  double s = term;
  for (int k = 1; k < terms; ++k) {
    term *= (x / 2.0) * (x / 2.0) / (k * (k + nu));
    s += term;
  }
  return s;
}

// Random symmetric positive-definite matrix with eigenvalues in [lo, hi].
inline Eigen::MatrixXd random_spd(int d, std::mt19937_64& gen, double lo = 0.05, double hi = 1.0) {
  std::normal_distribution<double> z;
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::MatrixXd a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = z(gen);
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  const Eigen::MatrixXd q = qr.householderQ();
  Eigen::VectorXd ev(d);
  for (int i = 0; i < d; ++i) ev(i) = u(gen);
  return q * ev.asDiagonal() * q.transpose();
}

// A censored sample with random windows of length ≥ min_len and uniform X.
// The law of X does not matter for the structural properties tested.
inline circense::CensoredSample random_sample(std::size_t n, std::mt19937_64& gen, double min_len = 1.0) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
  std::uniform_real_distribution<double> len(min_len, 2.0 * kPi - 0.01);
  std::vector<circense::CensoredObservation> obs;
  for (std::size_t i = 0; i < n; ++i) {
    const double l = angle(gen);
    const circense::CircularArc w{l, l + len(gen)};
    const circense::Angle x{angle(gen)};
    obs.push_back(circense::contains(w, x) ? circense::CensoredObservation::make_observed(x, w)
                                           : circense::CensoredObservation::make_censored(w));
  }
  return circense::CensoredSample{std::move(obs)};
}

}  // namespace oracle
