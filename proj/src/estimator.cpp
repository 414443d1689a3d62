#include "circense/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace circense {

namespace {

void require_same_dim(const ModelDim& a, const ModelDim& b, const char* what) {
  if (a != b) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (m = " +
                                std::to_string(a.m()) + " vs " + std::to_string(b.m()) + ")");
  }
}

Eigen::MatrixXd assemble(const ArcTrigIntegrals& mean_integrals, ModelDim m) {
  const int d = m.dim();
  Eigen::MatrixXd g(d, d);
  for (int a = 0; a < d; ++a) {
    for (int b = a; b < d; ++b) {
      const double v = product_integral(BasisIndex{a}, BasisIndex{b}, mean_integrals);
      g(a, b) = v;
      g(b, a) = v;
    }
  }
  return g;
}

}  // namespace

CensoredSample::CensoredSample(std::vector<CensoredObservation> observations)
    : observations_(std::move(observations)) {
  if (observations_.empty()) {
    throw DomainError("censored sample must contain at least one observation");
  }
  for (const auto& obs : observations_) {
    if (obs.observed && !contains(obs.arc, obs.angle)) {
      throw DomainError("observed angle lies outside its observation window");
    }
  }
}

std::size_t CensoredSample::observed_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(observations_.begin(), observations_.end(),
                    [](const CensoredObservation& o) { return o.observed; }));
}

double CensoredSample::censored_fraction() const noexcept {
  return 1.0 - static_cast<double>(observed_count()) / static_cast<double>(size());
}

GramMatrix GramMatrix::leading(ModelDim sub) const {
  if (sub.m() > m.m()) {
    throw std::invalid_argument("leading block larger than the Gram matrix");
  }
  return GramMatrix{sub, entries.topLeftCorner(sub.dim(), sub.dim())};
}

MomentVector MomentVector::leading(ModelDim sub) const {
  if (sub.m() > m.m()) {
    throw std::invalid_argument("leading block larger than the moment vector");
  }
  return MomentVector{sub, entries.head(sub.dim())};
}

Spectrum spectrum(const GramMatrix& gram) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram.entries,
                                                              Eigen::EigenvaluesOnly);
  const auto& ev = solver.eigenvalues();
  return Spectrum{ev.minCoeff(), ev.maxCoeff()};
}

double empirical_sigma(const CensoredSample& sample, Angle x) {
  std::size_t hits = 0;
  for (const auto& obs : sample.observations()) {
    if (contains(obs.arc, x)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(sample.size());
}

GramMatrix build_gram(const CensoredSample& sample, ModelDim m) {
  // Ĝ is linear in the per-arc trig integrals, so average those first.
  const int max_freq = 2 * m.m();
  auto mean = ArcTrigIntegrals::zeros(max_freq);
  for (const auto& obs : sample.observations()) {
    mean.accumulate(ArcTrigIntegrals(obs.arc, max_freq));
  }
  mean.scale(1.0 / static_cast<double>(sample.size()));
  return GramMatrix{m, assemble(mean, m)};
}

GramMatrix population_gram(const std::function<double(double)>& sigma, ModelDim m, int nodes) {
  if (nodes < 2) {
    throw std::invalid_argument("population_gram needs at least two nodes");
  }
  const int d = m.dim();
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(d, d);
  const double h = kTwoPi / nodes;
  for (int i = 0; i < nodes; ++i) {
    const double x = h * i;
    const auto phi = basis_vector(m, Angle{x});
    const Eigen::Map<const Eigen::VectorXd> v(phi.data(), d);
    g.noalias() += (sigma(x) * h) * (v * v.transpose());
  }
  return GramMatrix{m, g};
}

MomentVector build_moments(const CensoredSample& sample, ModelDim m) {
  Eigen::VectorXd u = Eigen::VectorXd::Zero(m.dim());
  for (const auto& obs : sample.observations()) {
    if (!obs.observed) continue;
    const auto phi = basis_vector(m, obs.angle);
    u += Eigen::Map<const Eigen::VectorXd>(phi.data(), m.dim());
  }
  u /= static_cast<double>(sample.size());
  return MomentVector{m, u};
}

namespace {

// U − G·a accumulated in long double, rounded once.
Eigen::VectorXd extended_residual(const Eigen::MatrixXd& g, const Eigen::VectorXd& a, const Eigen::VectorXd& u) {
  Eigen::VectorXd r(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    long double acc = u(i);
    for (Eigen::Index j = 0; j < a.size(); ++j) acc -= static_cast<long double>(g(i, j)) * a(j);
    r(i) = static_cast<double>(acc);
  }
  return r;
}

}  // namespace

FourierCoefficients solve_coefficients(const GramMatrix& gram, const MomentVector& moments) {
  require_same_dim(gram.m, moments.m, "solve_coefficients");
  const Spectrum spec = spectrum(gram);
  if (!spec.admissible()) {
    throw IllConditionedModel("Gram matrix for m = " + std::to_string(gram.m.m()) +
                              " is ill-conditioned (lambda_min = " + std::to_string(spec.min) +
                              ", lambda_max = " + std::to_string(spec.max) + ")");
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(gram.entries);
  if (llt.info() != Eigen::Success) {
    throw IllConditionedModel("Cholesky factorisation failed for m = " +
                              std::to_string(gram.m.m()));
  }
  Eigen::VectorXd a = llt.solve(moments.entries);
  // Near the admissibility edge Â is large enough that a double residual loses
  // the contrast identity; refine against a long double residual instead.
  for (int step = 0; step < 3; ++step) {
    const auto r = extended_residual(gram.entries, a, moments.entries);
    if (r.lpNorm<Eigen::Infinity>() == 0.0) break;
    a += llt.solve(r);
  }

  const double scale = std::max(1.0, moments.entries.lpNorm<Eigen::Infinity>());
  const double residual = (gram.entries * a - moments.entries).lpNorm<Eigen::Infinity>();
  if (!(residual <= 1e-8 * scale)) {
    throw IllConditionedModel("residual check failed for m = " + std::to_string(gram.m.m()));
  }
  return FourierCoefficients{gram.m, std::move(a)};
}

double contrast_value(const FourierCoefficients& coeffs, const MomentVector& moments) {
  require_same_dim(coeffs.m, moments.m, "contrast_value");
  return -coeffs.coeffs.dot(moments.entries);
}

DensityEstimate truncate_estimate(const FourierCoefficients& coeffs, std::size_t n) {
  const double k_n = static_cast<double>(n) * static_cast<double>(n);
  return DensityEstimate{coeffs, coeffs.squared_l2_norm() > k_n, k_n};
}

double evaluate_density(const DensityEstimate& est, Angle x) {
  if (est.truncated) return 0.0;
  const auto phi = basis_vector(est.coeffs.m, x);
  return est.coeffs.coeffs.dot(Eigen::Map<const Eigen::VectorXd>(phi.data(), est.coeffs.m.dim()));
}

DensityEstimate make_estimate(std::span<const double> coeffs) {
  if (coeffs.size() % 2 == 0) {
    throw std::invalid_argument("coefficient vector length must be odd (2m + 1)");
  }
  const ModelDim m{static_cast<int>(coeffs.size() / 2)};
  Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(coeffs.data(), m.dim());
  return DensityEstimate{FourierCoefficients{m, std::move(v)}, false,
                         std::numeric_limits<double>::infinity()};
}

}  // namespace circense
