#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bbmabs/barrier.hpp"
#include "bbmabs/engine.hpp"

namespace bbmabs::estimators {

// Monte Carlo estimate with a 95% confidence interval.  Proportions use an
// exact (Clopper-Pearson) interval when fewer than 30 successes were seen;
// everything else uses the normal interval.  Truncated replicates are
// excluded from the estimate and counted.
struct EstimateResult {
  double mean = 0.0;
  double stderr_ = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::uint64_t n_replicates = 0;  // replicates entering the estimate
  std::uint64_t seed = 0;
  std::uint64_t truncated_count = 0;
};

EstimateResult summarize_mean(std::span<const double> values, std::uint64_t seed,
                              std::uint64_t truncated_count);
EstimateResult summarize_proportion(std::uint64_t successes, std::uint64_t n,
                                    std::uint64_t seed, std::uint64_t truncated_count);

// Engine knobs shared by the experiment drivers.
struct RunOptions {
  double step_cap = 0.05;
  double step_frac = 0.1;
  std::uint64_t particle_cap = 1'000'000;
  int workers = 1;
};

// Proportion of replicates with a particle still alive at time t.  With
// barrier=true the run also kills at the moving boundary L(s) = c(t-s)^{1/3}.
EstimateResult estimate_survival(double x, double t, bool barrier, std::uint64_t n,
                                 std::uint64_t seed, const RunOptions& opt = {});

struct QuantileEstimate {
  double q;
  double value;
  double ci_low;
  double ci_high;
};

// Empirical quantiles of the extinction time zeta, with bootstrap CIs
// (1000 resamples).  Origin-only absorption; runs until extinction.
std::vector<QuantileEstimate> estimate_extinction_quantiles(double x,
                                                            std::span<const double> quantiles,
                                                            std::uint64_t n, std::uint64_t seed,
                                                            const RunOptions& opt = {});

// Boundary-hit statistics for the window [s,u] under the moving barrier with
// horizon t: mean of R_{s,u}, P(R_{s,u} > 0), the mean of R^2, and ratios to
// the shape h(0,x) (constants in the shape are unknown, so ratios are what
// the experiments report).
struct HitsEstimate {
  EstimateResult mean_hits;
  EstimateResult prob_positive;
  double second_moment = 0.0;
  double h0 = 0.0;  // h_shape(0, x, t)
  double ratio_mean_to_h = 0.0;
  double ratio_prob_to_h = 0.0;
  double ratio_second_to_h = 0.0;
};

HitsEstimate estimate_hits(double x, double t, double s, double u, std::uint64_t n,
                           std::uint64_t seed, const RunOptions& opt = {});

struct EzRatioPoint {
  double s;
  double ratio;  // E[Z(s)] / (Z(0) b_inv(0,s,t))
  double ci_low;
  double ci_high;
  double log_ratio_scaled;  // |log ratio| * (t-s)^{1/3}
};

std::vector<EzRatioPoint> ez_ratio(double x, double t, std::span<const double> s_list,
                                   std::uint64_t n, std::uint64_t seed,
                                   const RunOptions& opt = {});

struct DensityBin {
  double y_lo;
  double y_mid;
  double y_hi;
  std::uint64_t count;
  double q_hat;      // per-replicate particle density estimate
  double q_stderr;
  double reference;  // p_s (constant barrier) or psi (curved barrier)
  double ratio;      // q_hat / reference
  bool sufficient;   // enough mass for the band assertions
};

// Particle-density histogram at time s against the matching closed form.
std::vector<DensityBin> density_compare(double x, double s, const Barrier& barrier, int bins,
                                        std::uint64_t n, std::uint64_t seed,
                                        const RunOptions& opt = {});

// Discretized-bridge estimate of a line-crossing probability; pure path
// simulation, independent of the closed forms it is used to check.  `mean`
// carries a Richardson extrapolation over the fine grid and a 4x coarser
// subsample of the same paths, which cancels the O(sqrt(dt)) bias of
// discrete crossing detection.
struct BridgeMcEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  double fine = 0.0;  // raw fine-grid estimate
  std::uint64_t steps = 0;
  std::uint64_t paths = 0;
};

BridgeMcEstimate bridge_crossing_mc(double x, double y, double t, analytic::LineBoundary line,
                                    bool above, std::uint64_t steps, std::uint64_t paths,
                                    std::uint64_t seed, int workers = 1);

// Mean of V(s_eval) over independent paths, against the exact V(0).
struct VMartingaleEstimate {
  double v0 = 0.0;
  double g0 = 0.0;
  double s_eval = 0.0;
  EstimateResult v_mean;
};

VMartingaleEstimate estimate_v_martingale(double x, double t, double dt, double s_eval,
                                          std::uint64_t n, std::uint64_t seed, int workers = 1);

// Mean of K(y) (and of y e^{-sqrt2 y} K(y)) over Neveu runs.
struct NeveuEstimate {
  EstimateResult k_mean;
  EstimateResult scaled_mean;  // y e^{-sqrt2 y} K(y)
  double expected_k = 0.0;     // e^{sqrt2 y}
};

NeveuEstimate estimate_neveu(double y, double zeta, std::uint64_t n, std::uint64_t seed,
                             std::uint64_t cap = 10'000'000, int workers = 1);

// Extinction times for n replicates (origin-only absorption); +inf marks a
// truncated replicate.  Building block for the quantile and window stats.
std::vector<double> extinction_times(double x, std::uint64_t n, std::uint64_t seed,
                                     const RunOptions& opt = {},
                                     std::uint64_t* truncated_out = nullptr);

std::vector<QuantileEstimate> quantiles_from_samples(std::span<const double> zeta,
                                                     std::span<const double> quantiles,
                                                     std::uint64_t seed);

// Mean of the M statistic at each checkpoint time (origin-only absorption).
std::vector<EstimateResult> estimate_m_at(double x, std::span<const double> times,
                                          std::uint64_t n, std::uint64_t seed,
                                          const RunOptions& opt = {});

// Offspring law of a Galton-Watson process, p[k] = P(X = k).
struct OffspringLaw {
  std::vector<double> p;
  double mean() const;
  double factorial_moment() const;  // E[X(X-1)]
};

OffspringLaw poisson_law(double lambda);

// Smallest fixed point of the generating function phi(q) = sum p_k q^k,
// found by monotone iteration from 0; exactly 1 in the (sub)critical case.
double gw_extinction(const OffspringLaw& law, double tol);

// Survival lower bound 2(E[X]-1)/E[X(X-1)], clamped to [0,1].
double gw_survival_lower_bound(double mean, double factorial_moment);

}  // namespace bbmabs::estimators
