#include "circense/basis.hpp"

#include <cmath>
#include <cstdlib>
#include <string>
#include <utility>

namespace circense {

namespace {

const double kInvSqrtPi = 1.0 / std::sqrt(kPi);
const double kInvSqrtTwoPi = 1.0 / std::sqrt(kTwoPi);

// ∫_a^b cos(f x) dx and ∫_a^b sin(f x) dx for a plain (non-wrapping) interval.
void add_interval(double a, double b, std::vector<double>& cos_int, std::vector<double>& sin_int) {
  if (b <= a) return;
  cos_int[0] += b - a;
  for (std::size_t f = 1; f < cos_int.size(); ++f) {
    const double fd = static_cast<double>(f);
    cos_int[f] += (std::sin(fd * b) - std::sin(fd * a)) / fd;
    sin_int[f] += (std::cos(fd * a) - std::cos(fd * b)) / fd;
  }
}

int kind_rank(BasisKind k) {
  switch (k) {
    case BasisKind::constant: return 0;
    case BasisKind::cosine: return 1;
    case BasisKind::sine: return 2;
  }
  return 0;
}

}  // namespace

BasisIndex::BasisIndex(int lambda) : lambda_(lambda) {
  if (lambda < 0) {
    throw DomainError("basis index must be non-negative, got " + std::to_string(lambda));
  }
}

ModelDim::ModelDim(int m) : m_(m) {
  if (m < 0 || m > kMaxModel) {
    throw DomainError("model index m must lie in [0, " + std::to_string(kMaxModel) + "], got " +
                      std::to_string(m));
  }
}

double basis_eval(BasisIndex idx, Angle x) noexcept {
  const double j = static_cast<double>(idx.frequency());
  switch (idx.kind()) {
    case BasisKind::constant: return kInvSqrtTwoPi;
    case BasisKind::cosine: return std::cos(j * x.value()) * kInvSqrtPi;
    case BasisKind::sine: return std::sin(j * x.value()) * kInvSqrtPi;
  }
  return 0.0;
}

std::vector<double> basis_vector(ModelDim m, Angle x) {
  std::vector<double> out(static_cast<std::size_t>(m.dim()));
  out[0] = kInvSqrtTwoPi;
  for (int j = 1; j <= m.m(); ++j) {
    const double arg = static_cast<double>(j) * x.value();
    out[2 * j - 1] = std::cos(arg) * kInvSqrtPi;
    out[2 * j] = std::sin(arg) * kInvSqrtPi;
  }
  return out;
}

ArcTrigIntegrals::ArcTrigIntegrals(const CircularArc& arc, int max_frequency)
    : ArcTrigIntegrals(zeros(max_frequency)) {
  const double s = arc.start().value();
  const double e = arc.end().value();
  if (s < e) {
    add_interval(s, e, cos_int, sin_int);
  } else {
    add_interval(s, kTwoPi, cos_int, sin_int);
    add_interval(0.0, e, cos_int, sin_int);
  }
}

ArcTrigIntegrals ArcTrigIntegrals::zeros(int max_frequency) {
  if (max_frequency < 0) {
    throw DomainError("max_frequency must be non-negative");
  }
  ArcTrigIntegrals out;
  out.cos_int.assign(static_cast<std::size_t>(max_frequency) + 1, 0.0);
  out.sin_int.assign(static_cast<std::size_t>(max_frequency) + 1, 0.0);
  return out;
}

void ArcTrigIntegrals::accumulate(const ArcTrigIntegrals& other) {
  for (std::size_t f = 0; f < cos_int.size(); ++f) {
    cos_int[f] += other.cos_int[f];
    sin_int[f] += other.sin_int[f];
  }
}

void ArcTrigIntegrals::scale(double factor) {
  for (std::size_t f = 0; f < cos_int.size(); ++f) {
    cos_int[f] *= factor;
    sin_int[f] *= factor;
  }
}

double product_integral(BasisIndex a, BasisIndex b, const ArcTrigIntegrals& integrals) noexcept {
  // Canonical order makes the result exactly symmetric in (a, b).
  if (kind_rank(a.kind()) > kind_rank(b.kind()) ||
      (a.kind() == b.kind() && a.lambda() > b.lambda())) {
    std::swap(a, b);
  }
  const auto c = [&](int f) { return integrals.cos_int[static_cast<std::size_t>(std::abs(f))]; };
  const auto s = [&](int f) {
    const double v = integrals.sin_int[static_cast<std::size_t>(std::abs(f))];
    return f < 0 ? -v : v;
  };
  const int j = a.frequency();
  const int k = b.frequency();

  if (a.kind() == BasisKind::constant) {
    switch (b.kind()) {
      case BasisKind::constant: return c(0) / kTwoPi;
      case BasisKind::cosine: return c(k) * kInvSqrtTwoPi * kInvSqrtPi;
      case BasisKind::sine: return s(k) * kInvSqrtTwoPi * kInvSqrtPi;
    }
  }
  if (a.kind() == BasisKind::cosine && b.kind() == BasisKind::cosine) {
    return 0.5 * (c(j - k) + c(j + k)) / kPi;
  }
  if (a.kind() == BasisKind::sine && b.kind() == BasisKind::sine) {
    return 0.5 * (c(j - k) - c(j + k)) / kPi;
  }
  // cos(jx) sin(kx) = ½ [sin((k + j)x) + sin((k − j)x)]
  return 0.5 * (s(k + j) + s(k - j)) / kPi;
}

double arc_inner_product(BasisIndex a, BasisIndex b, const CircularArc& arc) {
  const ArcTrigIntegrals integrals(arc, a.frequency() + b.frequency());
  return product_integral(a, b, integrals);
}

}  // namespace circense
