#include "circense/circle.hpp"

#include <cmath>

namespace circense {

Angle::Angle(double raw) {
  if (!std::isfinite(raw)) {
    throw DomainError("angle must be finite");
  }
  double r = std::fmod(raw, kTwoPi);
  if (r < 0.0) {
    r += kTwoPi;
  }
  // r + 2π can round up to exactly 2π for tiny negative r.
  if (r >= kTwoPi) {
    r = 0.0;
  }
  value_ = r;
}

Angle normalize(double raw) { return Angle{raw}; }

CircularArc::CircularArc(Angle start, Angle end) : start_(start), end_(end) {
  if (start_ == end_) {
    throw DomainError("circular arc endpoints must differ");
  }
}

bool contains(const CircularArc& arc, Angle x) noexcept {
  const double s = arc.start().value();
  const double e = arc.end().value();
  const double v = x.value();
  if (s <= e) {
    return s <= v && v <= e;
  }
  return v >= s || v <= e;
}

double arc_length(const CircularArc& arc) noexcept {
  const double s = arc.start().value();
  const double e = arc.end().value();
  return e > s ? e - s : kTwoPi - (s - e);
}

CircularArc complement(const CircularArc& arc) { return CircularArc{arc.end(), arc.start()}; }

CensoredObservation CensoredObservation::make_observed(Angle x, const CircularArc& window) {
  if (!contains(window, x)) {
    throw DomainError("observed angle lies outside its observation window");
  }
  return CensoredObservation{true, x, window};
}

CensoredObservation CensoredObservation::make_censored(const CircularArc& window) {
  return CensoredObservation{false, Angle{}, window};
}

}  // namespace circense
