#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "circense/circle.hpp"
#include "circense/estimator.hpp"

namespace circense {

/// Seeded generator for one independent stream.
///
/// The stream state is derived from (seed, stream) by SplitMix64, so each
/// Monte Carlo replication can own its generator and results do not depend
/// on scheduling. Bits come from std::mt19937_64, whose output sequence is
/// fixed by the standard.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream = 0);

  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] std::uint64_t stream() const noexcept { return stream_; }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
};

struct VonMises {
  Angle mu;
  double kappa = 0.0;
};

struct MixtureComponent {
  double weight = 0.0;
  VonMises law;
};

struct Mixture {
  std::vector<MixtureComponent> components;
};

struct UniformArc {
  CircularArc arc;
};

/// A law on the circle. Construct through the make_* helpers, which
/// validate parameters.
struct CircularDistribution {
  std::variant<VonMises, Mixture, UniformArc> law;

  [[nodiscard]] double density(Angle x) const;
  [[nodiscard]] std::string describe() const;
};

[[nodiscard]] CircularDistribution make_von_mises(double mu, double kappa);
/// Weights must be positive and sum to 1 within 1e-9.
[[nodiscard]] CircularDistribution make_mixture(std::vector<MixtureComponent> components);
[[nodiscard]] CircularDistribution make_uniform_arc(double start, double end);

/// e^{k cos(x − μ)} / (2π I₀(k)). Throws DomainError for k < 0.
[[nodiscard]] double von_mises_density(Angle mu, double kappa, Angle x);

/// Best–Fisher rejection sampler for M(μ, k).
[[nodiscard]] Angle sample_von_mises(const VonMises& law, Rng& rng);

[[nodiscard]] Angle sample(const CircularDistribution& dist, Rng& rng);

struct TaggedDraw {
  Angle angle;
  std::size_t component = 0;  ///< mixture component index; 0 for other laws
};

/// Like sample(), also reporting which mixture component produced the draw.
[[nodiscard]] TaggedDraw sample_tagged(const CircularDistribution& dist, Rng& rng);

struct Independent {};
/// U = L − α.
struct FixedOffset {
  double alpha = 0.0;
};

struct ScenarioSpec {
  std::string name;
  CircularDistribution target;
  CircularDistribution lower_law;
  CircularDistribution upper_law;  ///< ignored under FixedOffset
  std::variant<Independent, FixedOffset> coupling = Independent{};
};

/// One uncensored draw of (X, L, U) with L ≠ U.
struct RawTriplet {
  Angle x;
  Angle lower;
  Angle upper;
};

/// Draws X, then L, then U; redraws (L, U) while L = U.
[[nodiscard]] RawTriplet draw_triplet(const ScenarioSpec& spec, Rng& rng);

[[nodiscard]] CensoredObservation censor(const RawTriplet& t);

/// n independent censored triplets.
[[nodiscard]] CensoredSample generate_sample(const ScenarioSpec& spec, std::size_t n, Rng& rng);

struct CensoringStats {
  double censored_fraction = 0.0;
  double mean_censoring_arc = 0.0;  ///< mean length of (U, L)
};

[[nodiscard]] CensoringStats mean_censoring_stats(const ScenarioSpec& spec, std::size_t n, Rng& rng);

/// The four simulation models: X ~ M(π,1) (models 1, 2, 4) or the bimodal
/// mixture 0.6·M(π/3,3) + 0.4·M(15π/9,3) (model 3), with independent
/// Von Mises or uniform-arc laws for L and U.
[[nodiscard]] ScenarioSpec model_scenario(int model);

/// L uniform on the circle, U = L − α, X ~ M(2, 1).
[[nodiscard]] ScenarioSpec offset_scenario(double alpha);

}  // namespace circense
