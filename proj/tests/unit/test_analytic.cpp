#include "bbmabs/analytic.hpp"

#include <cmath>
#include <numbers>

#include "doctest.h"

#include "bbmabs/rng.hpp"
#include "support/oracles.hpp"

using namespace bbmabs;
using namespace bbmabs::analytic;

namespace {
constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kPi = std::numbers::pi;
}  // namespace

TEST_CASE("critical constants") {
  const auto k = constants();
  // Reference values from 50-digit arithmetic.
  CHECK(k.tau == doctest::Approx(0.095526528041792710).epsilon(1e-14));
  CHECK(k.c == doctest::Approx(2.1875534279906521).epsilon(1e-14));
  CHECK(std::abs(kSqrt2 * k.c - std::cbrt(3.0 * kPi * kPi)) < 1e-12);
  CHECK(k.c == doctest::Approx(std::pow(k.tau, -1.0 / 3.0)).epsilon(1e-14));
}

TEST_CASE("bridge crossing closed forms") {
  CHECK(bridge_cross_above(0, 0, 1, {1, 0}) ==
        doctest::Approx(0.13533528323661270).epsilon(1e-14));
  CHECK(bridge_cross_above(1, 0, 2, {2, -0.5}) ==
        doctest::Approx(0.36787944117144233).epsilon(1e-14));
  CHECK(bridge_cross_below(1, 1, 1, {0, 0}) ==
        doctest::Approx(0.13533528323661270).epsilon(1e-14));

  // Exponent vanishes as the endpoint approaches the line.
  CHECK(bridge_cross_above(0, 1 - 1e-9, 1, {1, 0}) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(bridge_cross_below(1e-9, 1, 1, {0, 0}) == doctest::Approx(1.0).epsilon(1e-8));

  CHECK_THROWS_AS(bridge_cross_above(1.5, 0, 1, {1, 0}), std::domain_error);
  CHECK_THROWS_AS(bridge_cross_above(0, 2, 1, {1, 0}), std::domain_error);
  CHECK_THROWS_AS(bridge_cross_above(0, 0, 0, {1, 0}), std::domain_error);
  CHECK_THROWS_AS(bridge_cross_below(-1, 1, 1, {0, 0}), std::domain_error);
}

TEST_CASE("bridge reflection identity and monotonicity") {
  CounterRng rng(4242, 0, 0);
  for (int i = 0; i < 300; ++i) {
    const double t = 0.2 + 2.0 * rng.next_double();
    const double a = -1.0 + 2.0 * rng.next_double();
    const double b = -0.7 + 1.4 * rng.next_double();
    const double x = a + 0.1 + 2.0 * rng.next_double();
    const double y = a + b * t + 0.1 + 2.0 * rng.next_double();
    const double below = bridge_cross_below(x, y, t, {a, b});
    const double above = bridge_cross_above(-x, -y, t, {-a, -b});
    CHECK(below == doctest::Approx(above).epsilon(1e-13));
    CHECK(below > 0.0);
    CHECK(below < 1.0);
  }
  // Strictly decreasing in the line level, increasing in both endpoints.
  double prev = 1.0;
  for (double a = 1.0; a <= 2.0; a += 0.1) {
    const double v = bridge_cross_above(0, 0, 1, {a, 0});
    CHECK(v < prev);
    prev = v;
  }
  prev = 0.0;
  for (double x = -1.0; x < 0.9; x += 0.1) {
    const double v = bridge_cross_above(x, 0, 1, {1, 0});
    CHECK(v > prev);
    prev = v;
  }
  prev = 0.0;
  for (double y = -1.0; y < 0.9; y += 0.1) {
    const double v = bridge_cross_above(0, y, 1, {1, 0});
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("strip density principal term") {
  CHECK(strip_density_principal(8, 2, 2, 4) ==
        doctest::Approx(0.042402486235556889).epsilon(1e-12));
  CHECK(strip_density_principal(8, 1e-12, 2, 4) < 1e-11);
  CHECK(strip_density_principal(8, 2, 4 - 1e-12, 4) < 1e-11);
  CHECK_THROWS_AS(strip_density_principal(8, 4.5, 2, 4), std::domain_error);
  CHECK_THROWS_AS(strip_density_principal(0, 2, 2, 4), std::domain_error);

  // Symmetry of the product form: p_s(x,y) e^{sqrt2(y-x)} = p_s(y,x) e^{sqrt2(x-y)}.
  CounterRng rng(7, 0, 0);
  for (int i = 0; i < 100; ++i) {
    const double L = 1.0 + 4.0 * rng.next_double();
    const double x = L * (0.05 + 0.9 * rng.next_double());
    const double y = L * (0.05 + 0.9 * rng.next_double());
    const double s = 0.5 + 10.0 * rng.next_double();
    const double lhs = strip_density_principal(s, x, y, L) * std::exp(kSqrt2 * (y - x));
    const double rhs = strip_density_principal(s, y, x, L) * std::exp(kSqrt2 * (x - y));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("strip density integrates to the closed-form y-integral") {
  // int_0^L e^{-sqrt2 y} sin(pi y / L) dy = L pi (1 + e^{-sqrt2 L}) / (2L^2 + pi^2)
  for (double L : {1.0, 2.5, 4.0}) {
    const double closed = L * kPi * (1.0 + std::exp(-kSqrt2 * L)) / (2.0 * L * L + kPi * kPi);
    const double quad = oracles::simpson(
        [&](double y) { return std::exp(-kSqrt2 * y) * std::sin(kPi * y / L); }, 0.0, L, 4000);
    CHECK(quad == doctest::Approx(closed).epsilon(1e-10));

    const double s = 3.0;
    const double x = 0.4 * L;
    const double prefactor = (2.0 / L) * std::exp(-kPi * kPi * s / (2.0 * L * L)) *
                             std::exp(kSqrt2 * x) * std::sin(kPi * x / L);
    const double direct = oracles::simpson(
        [&](double y) { return strip_density_principal(s, x, y, L); }, 1e-12, L - 1e-12, 4000);
    CHECK(direct == doctest::Approx(prefactor * closed).epsilon(1e-8));
  }
}

TEST_CASE("strip density error bound") {
  // Frozen from a 300-term, 50-digit evaluation of the series.
  CHECK(strip_density_error_bound(16, 4) ==
        doctest::Approx(1.4879484879424370e-6).epsilon(1e-10));
  CHECK(strip_density_error_bound(8, 4) ==
        doctest::Approx(2.4396539576185352e-3).epsilon(1e-10));

  // n = 3 contributes ~9.87e-6 of the s = L^2/2 total (n = 2 dominates).
  const double n3 = 9.0 * std::exp(-2.0 * kPi * kPi);
  CHECK(n3 / strip_density_error_bound(8, 4) < 1e-5);

  // Large s: every term vanishes.
  CHECK(strip_density_error_bound(1e4, 1) < 1e-200);

  // Remains a true upper bound on direct partial sums.
  for (double ratio : {0.5, 1.0, 2.0}) {
    const double L = 3.0;
    const double s = ratio * L * L;
    double partial = 0.0;
    for (int n = 2; n <= 50; ++n)
      partial += n * n * std::exp(-kPi * kPi * (n * n - 1) * s / (2.0 * L * L));
    const double bound = strip_density_error_bound(s, L);
    CHECK(bound >= partial);
    CHECK(bound <= partial * (1.0 + 1e-10) + 1e-300);
  }
}

TEST_CASE("green bound") {
  CHECK(green_bound(1, 1, 2) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(green_bound(1, 2, 2) == 0.0);
  CHECK(green_bound(0, 1, 2) == 0.0);
  CHECK_THROWS_AS(green_bound(-0.1, 1, 2), std::domain_error);
  CHECK_THROWS_AS(green_bound(1, 2.1, 2), std::domain_error);
}

TEST_CASE("survival shape") {
  CHECK(survival_shape(1, 8) == doctest::Approx(0.011124134434550221).epsilon(1e-12));
  CHECK(survival_shape(1e-14, 8) < 1e-10);

  // At x = c t^{1/3}/2 the exponentials combine: e^{sqrt2 x} e^{-(3pi^2 t)^{1/3}}
  // = e^{-(3pi^2 t)^{1/3}/2}, using sqrt2 c = (3pi^2)^{1/3}.
  for (double t : {2.0, 8.0, 27.0}) {
    const double x = 0.5 * constants().c * std::cbrt(t);
    const double expect = std::cbrt(t) * std::exp(-0.5 * std::cbrt(3.0 * kPi * kPi * t));
    CHECK(survival_shape(x, t) == doctest::Approx(expect).epsilon(1e-12));
  }
  CHECK_THROWS_AS(survival_shape(constants().c * 2.0, 8), std::domain_error);
  CHECK_THROWS_AS(survival_shape(1, 0), std::domain_error);
}

TEST_CASE("b_inv value, endpoints, cocycle") {
  CHECK(b_inv(0, 1, 2) == doctest::Approx(0.39866496819310143).epsilon(1e-12));
  CHECK(b_inv(0.3, 0.3, 2) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(b_inv(1, 0.5, 2), std::domain_error);
  CHECK_THROWS_AS(b_inv(0, 2, 2), std::domain_error);

  CounterRng rng(99, 0, 0);
  for (int i = 0; i < 300; ++i) {
    const double t = 1.0 + 20.0 * rng.next_double();
    double r = t * rng.next_double() * 0.9;
    double s = r + (t - r) * rng.next_double() * 0.9;
    const double lhs = b_inv(0, s, t);
    const double rhs = b_inv(0, r, t) * b_inv(r, s, t);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    CHECK(lhs > 0.0);
    CHECK(lhs <= 1.0);
  }
}

TEST_CASE("psi value, edges, time-reversed form") {
  CHECK(psi(1, 8, 2, 1, 9) == doctest::Approx(0.059189927080844709).epsilon(1e-12));

  const double c = constants().c;
  {
    const double t = 9.0, s = 8.0;
    const double Ls = c * std::cbrt(t - s);
    CHECK(psi(1, s, 2, Ls * (1 - 1e-12), t) < 1e-10);
  }
  {  // r = s, x = y: exponentials cancel, leaving sin^2 / L.
    const double t = 9.0, r = 2.0, x = 1.3;
    const double Lr = c * std::cbrt(t - r);
    CHECK(psi(r, r, x, x, t) ==
          doctest::Approx(std::sin(kPi * x / Lr) * std::sin(kPi * x / Lr) / Lr).epsilon(1e-12));
  }

  // Forward parametrization vs the time-reversed display.
  CounterRng rng(123, 0, 0);
  for (int i = 0; i < 200; ++i) {
    const double t = 2.0 + 20.0 * rng.next_double();
    const double v = 0.05 + 0.4 * t * rng.next_double();       // v < u
    const double u = v + (t - v) * (0.1 + 0.8 * rng.next_double());
    const double Lu = c * std::cbrt(u);
    const double Lv = c * std::cbrt(v);
    const double x = Lu * (0.05 + 0.9 * rng.next_double());
    const double y = Lv * (0.05 + 0.9 * rng.next_double());
    const double forward = psi(t - u, t - v, x, y, t);
    const double reversed = (1.0 / c) *
                            std::exp(-std::cbrt(3 * kPi * kPi) * (std::cbrt(u) - std::cbrt(v))) *
                            std::pow(u * v, -1.0 / 6.0) * std::exp(kSqrt2 * x) *
                            std::sin(kPi * x / Lu) * std::exp(-kSqrt2 * y) *
                            std::sin(kPi * y / Lv);
    CHECK(forward == doctest::Approx(reversed).epsilon(1e-12));
  }
}

TEST_CASE("h and j shapes") {
  // h(s, 1, s+1) does not depend on s.
  CHECK(h_shape(0, 1, 1) == doctest::Approx(0.18478720552542501).epsilon(1e-12));
  CHECK(h_shape(3.7, 1, 4.7) == doctest::Approx(0.18478720552542501).epsilon(1e-12));
  const double c = constants().c;
  CHECK(h_shape(0, c * std::cbrt(8.0) * (1 - 1e-12), 8) < 1e-7);
  CHECK_THROWS_AS(h_shape(0, 5, 8), std::domain_error);
  CHECK_THROWS_AS(j_shape(0, -1, 8), std::domain_error);

  // Grid check of x t^{-1/3} <= 4 t^{1/3} sin(pi x / L(0)) for x < L(0) - 1.
  for (double t : {8.0, 16.0, 64.0}) {
    const double L0 = c * std::cbrt(t);
    for (double x = 0.05; x < L0 - 1.0; x += 0.05) {
      CHECK(x / std::cbrt(t) <= 4.0 * std::cbrt(t) * std::sin(kPi * x / L0));
      CHECK(h_shape(0, x, t) >= 0.0);
      CHECK(j_shape(0, x, t) >= 0.0);
    }
  }
}
