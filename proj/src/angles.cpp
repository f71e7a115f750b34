#include "tpn/angles.hpp"

#include <cmath>
#include <stdexcept>

namespace tpn {

Angle Angle::wrap(double radians) {
  if (!std::isfinite(radians)) {
    throw std::domain_error("wrap: non-finite angle");
  }
  // remainder() lands in [-pi, pi]; only the closed end needs remapping.
  double r = std::remainder(radians, kTwoPi);
  if (r >= kPi) r = -kPi;
  return Angle(r);
}

Angle wrap(double radians) { return Angle::wrap(radians); }

Angle mod_atan(double y, double x) {
  if (x == 0.0 && y == 0.0) {
    throw std::domain_error("mod_atan: direction undefined at the origin");
  }
  double a = std::atan2(y, x);
  if (a >= kPi) a = -kPi;
  return Angle::wrap(a);
}

double circ_distance(Angle a, Angle b) {
  const double d = std::fabs(a.rad() - b.rad());  // in [0, 2*pi)
  return kPi - std::fabs(kPi - d);
}

namespace {

std::pair<double, double> resultant(std::span<const double> radians) {
  if (radians.empty()) {
    throw std::domain_error("circular mean: empty sample");
  }
  double c = 0.0;
  double s = 0.0;
  for (double a : radians) {
    c += std::cos(a);
    s += std::sin(a);
  }
  const double n = static_cast<double>(radians.size());
  return {c / n, s / n};
}

}  // namespace

double circ_mrl(std::span<const double> radians) {
  auto [c, s] = resultant(radians);
  return std::hypot(c, s);
}

std::pair<Angle, double> circ_mean_and_mrl(std::span<const double> radians) {
  auto [c, s] = resultant(radians);
  const double mrl = std::hypot(c, s);
  if (mrl < 1e-12) {
    throw std::domain_error("circular mean: resultant too short, mean undefined");
  }
  return {mod_atan(s, c), mrl};
}

}  // namespace tpn
