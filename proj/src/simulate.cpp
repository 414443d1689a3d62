#include "circense/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "circense/special.hpp"

namespace circense {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t state = seed;
  const std::uint64_t a = splitmix64(state);
  state ^= stream * 0xD1B54A32D192ED03ULL;
  const std::uint64_t b = splitmix64(state);
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

struct Sampler {
  Rng& rng;

  TaggedDraw operator()(const VonMises& law) const { return {sample_von_mises(law, rng), 0}; }

  TaggedDraw operator()(const Mixture& mix) const {
    const double u = rng.uniform();
    double acc = 0.0;
    std::size_t pick = mix.components.size() - 1;
    for (std::size_t i = 0; i < mix.components.size(); ++i) {
      acc += mix.components[i].weight;
      if (u < acc) {
        pick = i;
        break;
      }
    }
    return {sample_von_mises(mix.components[pick].law, rng), pick};
  }

  TaggedDraw operator()(const UniformArc& u) const {
    const double len = arc_length(u.arc);
    return {Angle{u.arc.start().value() + rng.uniform() * len}, 0};
  }
};

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), engine_(make_engine(seed, stream)) {}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double von_mises_density(Angle mu, double kappa, Angle x) {
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) {
    throw DomainError("Von Mises concentration must be finite and non-negative");
  }
  if (kappa > 50.0) {
    // Scaled form avoids overflowing e^k and I₀(k).
    const double i0_scaled = bessel_i0(kappa) * std::exp(-kappa);
    return std::exp(kappa * (std::cos(x.value() - mu.value()) - 1.0)) / (kTwoPi * i0_scaled);
  }
  return std::exp(kappa * std::cos(x.value() - mu.value())) / (kTwoPi * bessel_i0(kappa));
}

CircularDistribution make_von_mises(double mu, double kappa) {
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) {
    throw DomainError("Von Mises concentration must be finite and non-negative");
  }
  return CircularDistribution{VonMises{Angle{mu}, kappa}};
}

CircularDistribution make_mixture(std::vector<MixtureComponent> components) {
  if (components.empty()) throw DomainError("mixture needs at least one component");
  double total = 0.0;
  for (const auto& c : components) {
    if (!(c.weight > 0.0)) throw DomainError("mixture weights must be positive");
    if (!(c.law.kappa >= 0.0)) throw DomainError("Von Mises concentration must be non-negative");
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-9) throw DomainError("mixture weights must sum to 1");
  return CircularDistribution{Mixture{std::move(components)}};
}

CircularDistribution make_uniform_arc(double start, double end) {
  return CircularDistribution{UniformArc{CircularArc{start, end}}};
}

double CircularDistribution::density(Angle x) const {
  struct Visitor {
    Angle x;
    double operator()(const VonMises& v) const { return von_mises_density(v.mu, v.kappa, x); }
    double operator()(const Mixture& m) const {
      double s = 0.0;
      for (const auto& c : m.components) s += c.weight * von_mises_density(c.law.mu, c.law.kappa, x);
      return s;
    }
    double operator()(const UniformArc& u) const {
      return contains(u.arc, x) ? 1.0 / arc_length(u.arc) : 0.0;
    }
  };
  return std::visit(Visitor{x}, law);
}

std::string CircularDistribution::describe() const {
  std::ostringstream os;
  os.precision(6);
  struct Visitor {
    std::ostringstream& os;
    void operator()(const VonMises& v) const { os << "vonmises(" << v.mu.value() << ", " << v.kappa << ")"; }
    void operator()(const Mixture& m) const {
      os << "mixture(";
      for (std::size_t i = 0; i < m.components.size(); ++i) {
        const auto& c = m.components[i];
        os << (i ? "; " : "") << c.weight << ", " << c.law.mu.value() << ", " << c.law.kappa;
      }
      os << ")";
    }
    void operator()(const UniformArc& u) const {
      os << "uniform_arc(" << u.arc.start().value() << ", " << u.arc.end().value() << ")";
    }
  };
  std::visit(Visitor{os}, law);
  return os.str();
}

Angle sample_von_mises(const VonMises& law, Rng& rng) {
  const double k = law.kappa;
  if (k < 1e-8) {
    return Angle{kTwoPi * rng.uniform()};
  }
  const double tau = 1.0 + std::sqrt(1.0 + 4.0 * k * k);
  const double rho = (tau - std::sqrt(2.0 * tau)) / (2.0 * k);
  const double r = (1.0 + rho * rho) / (2.0 * rho);
  for (;;) {
    const double u1 = rng.uniform();
    const double u2 = rng.uniform();
    const double u3 = rng.uniform();
    const double z = std::cos(kPi * u1);
    const double f = (1.0 + r * z) / (r + z);
    const double c = k * (r - f);
    if (c * (2.0 - c) - u2 > 0.0 || (u2 > 0.0 && std::log(c / u2) + 1.0 - c >= 0.0)) {
      const double theta = std::acos(std::clamp(f, -1.0, 1.0));
      return Angle{law.mu.value() + (u3 < 0.5 ? -theta : theta)};
    }
  }
}

TaggedDraw sample_tagged(const CircularDistribution& dist, Rng& rng) {
  return std::visit(Sampler{rng}, dist.law);
}

Angle sample(const CircularDistribution& dist, Rng& rng) { return sample_tagged(dist, rng).angle; }

RawTriplet draw_triplet(const ScenarioSpec& spec, Rng& rng) {
  const Angle x = sample(spec.target, rng);
  for (;;) {
    const Angle lower = sample(spec.lower_law, rng);
    const Angle upper = std::holds_alternative<FixedOffset>(spec.coupling)
                            ? Angle{lower.value() - std::get<FixedOffset>(spec.coupling).alpha}
                            : sample(spec.upper_law, rng);
    if (lower != upper) return RawTriplet{x, lower, upper};
  }
}

CensoredObservation censor(const RawTriplet& t) {
  const CircularArc window{t.lower, t.upper};
  return contains(window, t.x) ? CensoredObservation::make_observed(t.x, window)
                               : CensoredObservation::make_censored(window);
}

CensoredSample generate_sample(const ScenarioSpec& spec, std::size_t n, Rng& rng) {
  std::vector<CensoredObservation> obs;
  obs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) obs.push_back(censor(draw_triplet(spec, rng)));
  return CensoredSample{std::move(obs)};
}

CensoringStats mean_censoring_stats(const ScenarioSpec& spec, std::size_t n, Rng& rng) {
  if (n == 0) throw DomainError("mean_censoring_stats needs n >= 1");
  std::size_t censored = 0;
  double arc_total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto obs = censor(draw_triplet(spec, rng));
    if (!obs.observed) ++censored;
    arc_total += arc_length(complement(obs.arc));
  }
  const double nd = static_cast<double>(n);
  return CensoringStats{static_cast<double>(censored) / nd, arc_total / nd};
}

ScenarioSpec model_scenario(int model) {
  const auto x_law = make_von_mises(kPi, 1.0);
  switch (model) {
    case 1:
      return {"model1", x_law, make_von_mises(2 * kPi / 3, 1.0), make_von_mises(4 * kPi / 3, 1.0)};
    case 2:
      return {"model2", x_law, make_von_mises(4 * kPi / 3, 1.0), make_von_mises(2 * kPi / 3, 1.0)};
    case 3:
      return {"model3",
              make_mixture({{0.6, VonMises{Angle{kPi / 3}, 3.0}}, {0.4, VonMises{Angle{15 * kPi / 9}, 3.0}}}),
              make_von_mises(2 * kPi / 3, 3.0), make_von_mises(4 * kPi / 3, 3.0)};
    case 4:
      return {"model4", x_law, make_uniform_arc(-kPi / 12, kPi + kPi / 12),
              make_uniform_arc(kPi - kPi / 12, kPi / 12)};
    default:
      throw DomainError("unknown model " + std::to_string(model) + " (expected 1..4)");
  }
}

ScenarioSpec offset_scenario(double alpha) {
  if (!(alpha > 0.0 && alpha < kTwoPi)) {
    throw DomainError("censoring arc length alpha must lie in (0, 2pi)");
  }
  std::ostringstream name;
  name << "offset_alpha" << alpha;
  // M(0, 0) is the uniform law on the circle.
  return ScenarioSpec{name.str(), make_von_mises(2.0, 1.0), make_von_mises(0.0, 0.0),
                      make_von_mises(0.0, 0.0), FixedOffset{alpha}};
}

}  // namespace circense
