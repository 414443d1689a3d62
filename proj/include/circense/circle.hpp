#pragma once

#include <numbers>
#include <stdexcept>
#include <string>

namespace circense {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Raised for invalid numeric input (non-finite angles, negative
/// concentrations, degenerate arcs).
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// A point on the circle, stored as its unique representative in [0, 2π).
class Angle {
 public:
  constexpr Angle() noexcept = default;

  /// Reduces `raw` modulo 2π. Throws DomainError for non-finite input.
  explicit Angle(double raw);

  [[nodiscard]] constexpr double value() const noexcept { return value_; }
  [[nodiscard]] constexpr bool operator==(const Angle&) const noexcept = default;
  [[nodiscard]] constexpr auto operator<=>(const Angle&) const noexcept = default;

  [[nodiscard]] Angle rotated(double delta) const { return Angle{value_ + delta}; }

 private:
  double value_ = 0.0;
};

/// True mathematical modulo: the result is always in [0, 2π).
[[nodiscard]] Angle normalize(double raw);

/// The closed arc swept anticlockwise from `start` to `end`.
///
/// When start > end the arc wraps through 0, i.e. [start, 2π) ∪ [0, end].
/// Degenerate arcs (start == end) are rejected: they would be ambiguous
/// between a point and the full circle.
class CircularArc {
 public:
  CircularArc(Angle start, Angle end);
  CircularArc(double start, double end) : CircularArc(Angle{start}, Angle{end}) {}

  [[nodiscard]] Angle start() const noexcept { return start_; }
  [[nodiscard]] Angle end() const noexcept { return end_; }
  [[nodiscard]] bool wraps() const noexcept { return start_.value() > end_.value(); }

  [[nodiscard]] bool operator==(const CircularArc&) const noexcept = default;

 private:
  Angle start_;
  Angle end_;
};

/// Closed at both endpoints.
[[nodiscard]] bool contains(const CircularArc& arc, Angle x) noexcept;

/// Length in (0, 2π).
[[nodiscard]] double arc_length(const CircularArc& arc) noexcept;

/// The arc from `end` back to `start`. For an observation window [L, U]
/// this is the censoring arc (U, L), returned with closed endpoints.
[[nodiscard]] CircularArc complement(const CircularArc& arc);

/// One censored triplet. `angle` only carries information when `observed`.
struct CensoredObservation {
  bool observed = false;
  Angle angle;
  CircularArc arc;

  /// Enforces observed ⇒ contains(arc, angle).
  static CensoredObservation make_observed(Angle x, const CircularArc& window);
  static CensoredObservation make_censored(const CircularArc& window);

  [[nodiscard]] bool operator==(const CensoredObservation&) const noexcept = default;
};

}  // namespace circense
