#include "bbmabs/analytic.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bbmabs::analytic {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kSqrt2 = std::numbers::sqrt2;

double moving_level(double u, double t, double c) { return c * std::cbrt(t - u); }
}  // namespace

CriticalConstants constants() noexcept {
  static const CriticalConstants k = [] {
    const double tau = 2.0 * kSqrt2 / (3.0 * kPi * kPi);
    return CriticalConstants{tau, std::cbrt(1.0 / tau)};
  }();
  return k;
}

double bridge_cross_above(double x, double y, double t, LineBoundary line) {
  if (!(t > 0.0)) throw std::domain_error("bridge_cross_above: t must be positive");
  if (!(x < line.a) || !(y < line.a + line.b * t))
    throw std::domain_error("bridge_cross_above: endpoints must lie below the line");
  return std::exp(-2.0 * (line.a - x) * (line.a + line.b * t - y) / t);
}

double bridge_cross_below(double x, double y, double t, LineBoundary line) {
  if (!(t > 0.0)) throw std::domain_error("bridge_cross_below: t must be positive");
  if (!(x > line.a) || !(y > line.a + line.b * t))
    throw std::domain_error("bridge_cross_below: endpoints must lie above the line");
  return std::exp(-2.0 * (x - line.a) * (y - line.a - line.b * t) / t);
}

double strip_density_principal(double s, double x, double y, double L) {
  if (!(s > 0.0)) throw std::domain_error("strip_density_principal: s must be positive");
  if (!(L > 0.0) || !(x > 0.0) || !(x < L) || !(y > 0.0) || !(y < L))
    throw std::domain_error("strip_density_principal: x,y must lie in (0,L)");
  return (2.0 / L) * std::exp(-kPi * kPi * s / (2.0 * L * L)) * std::exp(kSqrt2 * x) *
         std::sin(kPi * x / L) * std::exp(-kSqrt2 * y) * std::sin(kPi * y / L);
}

double strip_density_error_bound(double s, double L) {
  if (!(s > 0.0) || !(L > 0.0))
    throw std::domain_error("strip_density_error_bound: s and L must be positive");
  const double k = kPi * kPi * s / (2.0 * L * L);  // > 0
  double sum = 0.0;
  for (long n = 2; n < 2'000'000; ++n) {
    const double nn = static_cast<double>(n);
    const double term = nn * nn * std::exp(-k * (nn * nn - 1.0));
    sum += term;
    // Term ratios are decreasing in n; once the current ratio is < 1 and the
    // term is negligible, a geometric majorant covers the rest of the series,
    // keeping the result a true upper bound.
    const double ratio = ((nn + 1.0) * (nn + 1.0)) / (nn * nn) * std::exp(-k * (2.0 * nn + 1.0));
    if (ratio < 1.0 && term <= 1e-16 * sum) {
      sum += term * ratio / (1.0 - ratio);
      break;
    }
  }
  return sum;
}

double green_bound(double x, double y, double L) {
  if (!(L > 0.0) || x < 0.0 || x > L || y < 0.0 || y > L)
    throw std::domain_error("green_bound: x,y must lie in [0,L]");
  return 2.0 * std::exp(kSqrt2 * (x - y)) * x * (L - y) / L;
}

double survival_shape(double x, double t) {
  if (!(t > 0.0)) throw std::domain_error("survival_shape: t must be positive");
  const double width = constants().c * std::cbrt(t);
  if (!(x > 0.0) || !(x < width))
    throw std::domain_error("survival_shape: x must lie in (0, c t^{1/3})");
  return std::exp(kSqrt2 * x) * std::sin(kPi * x / width) * std::cbrt(t) *
         std::exp(-std::cbrt(3.0 * kPi * kPi * t));
}

double b_inv(double r, double s, double t) {
  if (!(0.0 <= r && r <= s && s < t)) throw std::domain_error("b_inv: need 0 <= r <= s < t");
  const double root3 = std::cbrt(3.0 * kPi * kPi);
  return std::exp(-root3 * (std::cbrt(t - r) - std::cbrt(t - s))) *
         std::pow((t - s) / (t - r), 1.0 / 6.0);
}

double psi(double r, double s, double x, double y, double t) {
  if (!(0.0 <= r && r <= s && s < t)) throw std::domain_error("psi: need 0 <= r <= s < t");
  const double c = constants().c;
  const double Lr = moving_level(r, t, c);
  const double Ls = moving_level(s, t, c);
  if (!(x > 0.0) || !(x < Lr)) throw std::domain_error("psi: x must lie in (0, L(r))");
  if (!(y > 0.0) || !(y < Ls)) throw std::domain_error("psi: y must lie in (0, L(s))");
  return (1.0 / Ls) * b_inv(r, s, t) * std::exp(kSqrt2 * x) * std::sin(kPi * x / Lr) *
         std::exp(-kSqrt2 * y) * std::sin(kPi * y / Ls);
}

double h_shape(double s, double x, double t) {
  if (!(0.0 <= s && s < t)) throw std::domain_error("h_shape: need 0 <= s < t");
  const double Ls = moving_level(s, t, constants().c);
  if (!(x > 0.0) || !(x < Ls)) throw std::domain_error("h_shape: x must lie in (0, L(s))");
  return std::exp(kSqrt2 * x) * std::sin(kPi * x / Ls) * std::cbrt(t - s) *
         std::exp(-std::cbrt(3.0 * kPi * kPi * (t - s)));
}

double j_shape(double s, double x, double t) {
  if (!(0.0 <= s && s < t)) throw std::domain_error("j_shape: need 0 <= s < t");
  if (!(x > 0.0)) throw std::domain_error("j_shape: x must be positive");
  return x * std::exp(kSqrt2 * x) / std::cbrt(t - s) *
         std::exp(-std::cbrt(3.0 * kPi * kPi * (t - s)));
}

}  // namespace bbmabs::analytic
