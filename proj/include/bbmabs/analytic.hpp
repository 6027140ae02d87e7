#pragma once

namespace bbmabs::analytic {

// tau = 2*sqrt(2)/(3*pi^2), c = tau^{-1/3}.  These two constants set the
// extinction-time scale (zeta ~ tau*x^3) and the critical strip width
// (L(s) = c*(t-s)^{1/3}).  They satisfy sqrt(2)*c = (3*pi^2)^{1/3}.
struct CriticalConstants {
  double tau;
  double c;
};

CriticalConstants constants() noexcept;

// Line s -> a + b*s, used for per-step boundary linearization.
struct LineBoundary {
  double a;  // level at local time 0
  double b;  // slope
};

// P(Brownian bridge from x to y over [0,t] touches a+bs from below).
// Requires t > 0, x < a, y < a + b*t; the certain-crossing cases are the
// caller's responsibility.
double bridge_cross_above(double x, double y, double t, LineBoundary line);

// Mirror image: P(bridge from x to y dips to a+bs from above).
double bridge_cross_below(double x, double y, double t, LineBoundary line);

// Principal term p_s(x,y) of the particle density in a strip (0,L) with
// constant right boundary:
//   p_s(x,y) = (2/L) e^{-pi^2 s / 2L^2} e^{sqrt2 x} sin(pi x/L) e^{-sqrt2 y} sin(pi y/L).
double strip_density_principal(double s, double x, double y, double L);

// Upper bound on the relative error |D_s| of the principal term:
//   sum_{n>=2} n^2 exp(-pi^2 (n^2-1) s / 2L^2),
// truncated once a term drops below 1e-16 of the partial sum, plus a
// geometric tail majorant so the result stays a true upper bound.
double strip_density_error_bound(double s, double L);

// Bound on the time-integrated strip density: 2 e^{sqrt2(x-y)} x (L-y) / L.
double green_bound(double x, double y, double L);

// Survival-probability shape
//   Phi(x,t) = e^{sqrt2 x} sin(pi x / (c t^{1/3})) t^{1/3} e^{-(3 pi^2 t)^{1/3}};
// the survival probability equals Phi up to multiplicative constants.
double survival_shape(double x, double t);

// B_r(s)^{-1} = exp(-(3pi^2)^{1/3}((t-r)^{1/3}-(t-s)^{1/3})) ((t-s)/(t-r))^{1/6},
// the deterministic decay factor of the Z statistic between times r and s.
double b_inv(double r, double s, double t);

// Density shape psi_{r,s}(x,y) for the moving strip, L(u) = c(t-u)^{1/3}:
//   (1/L(s)) b_inv(r,s,t) e^{sqrt2 x} sin(pi x/L(r)) e^{-sqrt2 y} sin(pi y/L(s)).
double psi(double r, double s, double x, double y, double t);

// Boundary-hit shape functions:
//   h(s,x) = e^{sqrt2 x} sin(pi x/L(s)) (t-s)^{1/3} exp(-(3pi^2(t-s))^{1/3})
//   j(s,x) = x e^{sqrt2 x} (t-s)^{-1/3} exp(-(3pi^2(t-s))^{1/3})
double h_shape(double s, double x, double t);
double j_shape(double s, double x, double t);

}  // namespace bbmabs::analytic
