#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace bbmabs::diagnostics {

// Multiplicative functionals along one standard Brownian path xi started at
// x, for the moving strip L(u) = c(t-u)^{1/3}:
//   A(s) = exp( (1/2) int L' dxi - (1/8) int L'^2 du )
//   B(s) = exp( int pi^2/(2L^2) du - int L'/(2L) du )
//   C(s) = exp( (L'(s)/2L(s))(xi_s - L(s)/2)^2 - int (L''/2L)(xi - L/2)^2 du )
//   G = A*B*C,  V(s) = G(s) sin(pi xi_s / L(s)) 1{alive},
// where alive means 0 < xi_u < L(u) for all u <= s.
struct PathFunctional {
  double s;
  double a_val;
  double b_val;
  double c_val;
  double g_val;
  double v_val;
  bool alive;
};

// Simulates one path with step dt and returns the functionals at
// record_times (values are taken at the first grid point >= each record
// time).  An empty record list records every step.  Stochastic integrals use
// the left-point rule; du integrals use midpoint quadrature.  The quadrature
// for B is cross-checked against its closed form at every record time.
std::vector<PathFunctional> simulate_v_path(double x, double t, double dt, std::uint64_t seed,
                                            std::uint64_t replicate,
                                            std::span<const double> record_times = {});

struct NeveuResult {
  double y;
  double zeta;
  std::uint64_t k;       // particles ever absorbed at -y
  std::uint64_t k_zeta;  // those absorbed before time zeta
  bool truncated;
};

// Branching Brownian motion with drift -sqrt2 started at the origin, no
// right boundary; particles are killed and counted on reaching -y.  Runs
// until no particle is left or the cumulative particle cap is hit.
NeveuResult neveu_run(double y, double zeta, std::uint64_t seed, std::uint64_t replicate,
                      std::uint64_t cap = 10'000'000);

}  // namespace bbmabs::diagnostics
