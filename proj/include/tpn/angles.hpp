#pragma once

#include <optional>
#include <span>
#include <utility>

namespace tpn {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// A scalar angle, always held in [-pi, pi).
class Angle {
 public:
  Angle() = default;

  /// Reduces any finite value modulo 2*pi into [-pi, pi).
  /// Throws std::domain_error on non-finite input.
  static Angle wrap(double radians);

  [[nodiscard]] double rad() const { return value_; }

  friend bool operator==(Angle a, Angle b) { return a.value_ == b.value_; }

 private:
  explicit Angle(double wrapped) : value_(wrapped) {}
  double value_ = 0.0;
};

/// Free-function form of Angle::wrap.
Angle wrap(double radians);

/// Angle recovery from sine/cosine numerators: the unique a in [-pi, pi)
/// with cos a = x/hypot, sin a = y/hypot. The convention maps the cut
/// angle pi to -pi. Throws std::domain_error at the origin.
Angle mod_atan(double y, double x);

/// Arc-length distance on the circle, in [0, pi].
double circ_distance(Angle a, Angle b);

/// Mean resultant length of a sample of angles (radians). Zero-length
/// input throws std::domain_error.
double circ_mrl(std::span<const double> radians);

/// Circular mean and mean resultant length. Throws std::domain_error on
/// empty input and when the resultant length is below 1e-12 (the mean
/// direction is undefined at machine-noise scale).
std::pair<Angle, double> circ_mean_and_mrl(std::span<const double> radians);

}  // namespace tpn
