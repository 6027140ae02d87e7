// Acceptance suite: runs every acceptance criterion at its stated sample
// size and tolerance and prints one PASS/FAIL line per criterion.  Exit code
// is the number of failures.
//
// The suite is deterministic: all randomness derives from kSeed.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdarg>
#include <cstring>
#include <limits>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

#include "bbmabs/analytic.hpp"
#include "bbmabs/barrier.hpp"
#include "bbmabs/engine.hpp"
#include "bbmabs/estimators.hpp"
#include "bbmabs/rng.hpp"

using namespace bbmabs;

namespace {

constexpr std::uint64_t kSeed = 0x5EEDBB01;
constexpr double kSqrt2 = std::numbers::sqrt2;

int g_failures = 0;

std::uint64_t sub_seed(int criterion, int idx = 0) {
  return split_seed(kSeed, static_cast<std::uint64_t>(criterion) * 1000 + idx);
}

int workers() {
  const unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::min(8u, hw ? hw : 1u));
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

void report(int id, const char* name, bool pass, const std::string& detail) {
  if (!pass) ++g_failures;
  std::printf("%s  criterion %2d  %s  [%s]\n", pass ? "PASS" : "FAIL", id, name,
              detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

// ---------------------------------------------------------------------------

// 1. Closed-form bridge crossing probabilities vs the discretized-bridge
//    oracle (1e4 steps, 1e5 paths) for 20 random admissible lines.
void criterion_1() {
  Timer timer;
  CounterRng rng(sub_seed(1), 0, 0);
  double max_z = 0.0;
  bool ok = true;
  for (int i = 0; i < 20; ++i) {
    const bool above = i % 2 == 0;
    const double t = 0.8 + 0.8 * rng.next_double();
    const double g1 = 0.9 + 0.5 * rng.next_double();
    const double g2 = 0.9 + 0.5 * rng.next_double();
    const double slope = -0.5 + rng.next_double();
    const double anchor = -1.0 + 2.0 * rng.next_double();
    double x, y, exact;
    analytic::LineBoundary line{0.0, slope};
    if (above) {
      x = anchor;
      line.a = x + g1;
      y = line.a + slope * t - g2;
      exact = analytic::bridge_cross_above(x, y, t, line);
    } else {
      line.a = anchor;
      x = line.a + g1;
      y = line.a + slope * t + g2;
      exact = analytic::bridge_cross_below(x, y, t, line);
    }
    const auto mc = estimators::bridge_crossing_mc(x, y, t, line, above, 10000, 100000,
                                                   sub_seed(1, 100 + i), workers());
    const double z = (mc.mean - exact) / mc.stderr_;
    max_z = std::max(max_z, std::abs(z));
    if (std::abs(z) > 3.0) ok = false;
  }
  const double secs = timer.seconds();
  report(1, "bridge crossing formulas vs path oracle", ok && secs < 120.0,
         fmt("20 cases, max |z| = %.2f; %.1fs (budget 120s)", max_z, secs));
}

// 2. Pure-birth mean: E[N(2)] = e^2 with no killing.
void criterion_2() {
  Timer timer;
  engine::SimConfig cfg;
  cfg.mu = 0.0;
  cfg.absorb_origin = false;
  cfg.initial = {0.0};
  cfg.t_max = 2.0;
  cfg.checkpoint_times = {2.0};
  cfg.step_cap = 10.0;

  const std::uint64_t n = 100000;
  double sum = 0.0, sum2 = 0.0;
  for (std::uint64_t i = 0; i < n; ++i) {
    const double c = static_cast<double>(
        engine::run(cfg, std::nullopt, sub_seed(2), i).checkpoints[0].n);
    sum += c;
    sum2 += c * c;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sum2 / n - mean * mean) / (n - 1.0));
  const double z = (mean - std::exp(2.0)) / se;
  const double secs = timer.seconds();
  report(2, "pure-birth mean N(2) = e^2", std::abs(z) <= 3.0 && secs < 60.0,
         fmt("mean = %.4f vs %.4f, z = %+.2f; %.1fs (budget 60s)", mean, std::exp(2.0), z,
             secs));
}

// Shared state for criteria 3/6 so criterion 12 can rerun them halved.
struct MResult {
  std::vector<double> means, stderrs;
};
MResult run_m_martingale(double dmax, double eps) {
  estimators::RunOptions opt;
  opt.step_cap = dmax;
  opt.step_frac = eps;
  opt.workers = workers();
  const double times[] = {0.5, 1.0, 2.0};
  const auto res = estimators::estimate_m_at(1.0, times, 100000, sub_seed(3), opt);
  MResult out;
  for (const auto& r : res) {
    out.means.push_back(r.mean);
    out.stderrs.push_back(r.stderr_);
  }
  return out;
}

MResult g_c3_baseline;

// 3. M martingale: E[M(s)] = e^{sqrt2} for s in {0.5, 1, 2}.
void criterion_3() {
  Timer timer;
  g_c3_baseline = run_m_martingale(8.0, 0.1);
  const double target = std::exp(kSqrt2);
  bool ok = true;
  double max_z = 0.0;
  for (std::size_t j = 0; j < g_c3_baseline.means.size(); ++j) {
    const double z = (g_c3_baseline.means[j] - target) / g_c3_baseline.stderrs[j];
    max_z = std::max(max_z, std::abs(z));
    if (std::abs(z) > 3.0) ok = false;
  }
  const double secs = timer.seconds();
  report(3, "M martingale at s in {0.5,1,2}", ok && secs < 300.0,
         fmt("target %.4f, max |z| = %.2f; %.1fs (budget 300s)", target, max_z, secs));
}

// 4. V martingale: mean V(5) = V(0) at t = 10, x = L(0)/2, dt = 1e-3.
void criterion_4() {
  Timer timer;
  const double t = 10.0;
  const double x = 0.5 * analytic::constants().c * std::cbrt(t);
  const auto est = estimators::estimate_v_martingale(x, t, 1e-3, 5.0, 100000, sub_seed(4),
                                                     workers());
  const double z = (est.v_mean.mean - est.v0) / est.v_mean.stderr_;
  const double secs = timer.seconds();
  report(4, "V martingale mean V(5) = V(0)", std::abs(z) <= 3.0 && secs < 600.0,
         fmt("V(0) = %.6f, mean = %.6f, z = %+.2f; %.1fs (budget 600s)", est.v0,
             est.v_mean.mean, z, secs));
}

// 5. Constant-strip density: central-bin ratios to p_s within 15%.
void criterion_5() {
  Timer timer;
  estimators::RunOptions opt;
  opt.workers = workers();
  const auto rows =
      estimators::density_compare(2.0, 8.0, Barrier::constant(4.0), 40, 1000000,
                                  sub_seed(5), opt);
  bool ok = true;
  double worst = 0.0;
  int used = 0;
  for (const auto& r : rows) {
    if (!r.sufficient || r.y_mid < 1.0 || r.y_mid > 3.0) continue;
    ++used;
    worst = std::max(worst, std::abs(r.ratio - 1.0));
    if (std::abs(r.ratio - 1.0) > 0.15) ok = false;
  }
  if (used == 0) ok = false;
  const double secs = timer.seconds();
  report(5, "strip density central bins within 15% of p_s", ok && secs < 600.0,
         fmt("%d bins in [1,3], worst |ratio-1| = %.3f; %.1fs (budget 600s)", used, worst,
             secs));
}

struct SurvivalPoint {
  double t;
  std::uint64_t n;
  estimators::EstimateResult est;
  double ratio;
};
std::vector<SurvivalPoint> run_theorem1(double dmax, double eps) {
  estimators::RunOptions opt;
  opt.step_cap = dmax;
  opt.step_frac = eps;
  opt.workers = workers();
  const double ts[] = {8.0, 16.0, 24.0};
  const std::uint64_t ns[] = {100000, 1000000, 4000000};
  std::vector<SurvivalPoint> out;
  for (int i = 0; i < 3; ++i) {
    SurvivalPoint p;
    p.t = ts[i];
    p.n = ns[i];
    p.est = estimators::estimate_survival(1.0, ts[i], false, ns[i], sub_seed(6, i), opt);
    p.ratio = p.est.mean / analytic::survival_shape(1.0, ts[i]);
    out.push_back(p);
  }
  return out;
}

std::vector<SurvivalPoint> g_c6_baseline;

// 6. Survival-shape ratios pairwise within a factor 2; CIs exclude 0.
void criterion_6() {
  Timer timer;
  g_c6_baseline = run_theorem1(8.0, 0.1);
  bool ok = true;
  double rmin = std::numeric_limits<double>::infinity(), rmax = 0.0;
  for (const auto& p : g_c6_baseline) {
    rmin = std::min(rmin, p.ratio);
    rmax = std::max(rmax, p.ratio);
    if (!(p.est.ci_low > 0.0)) ok = false;
    if (p.est.truncated_count * 1000 > p.n) ok = false;
  }
  if (!(rmax <= 2.0 * rmin)) ok = false;
  const double secs = timer.seconds();
  report(6, "survival shape ratios across t in {8,16,24}", ok && secs < 3600.0,
         fmt("ratios in [%.3f, %.3f] (x%.2f); %.1fs (budget 3600s)", rmin, rmax,
             rmax / rmin, secs));
}

// 7. Extinction-time concentration from x = 7.
void criterion_7() {
  Timer timer;
  estimators::RunOptions opt;
  opt.step_cap = 0.1;
  opt.workers = workers();
  const double x = 7.0;
  const double tau = analytic::constants().tau;
  std::uint64_t truncated = 0;
  const auto zeta = estimators::extinction_times(x, 1000, sub_seed(7), opt, &truncated);
  const double qs[] = {0.5};
  const auto med = estimators::quantiles_from_samples(zeta, qs, sub_seed(7, 1));
  const double center = tau * x * x * x;
  const double half = 3.0 * x * x;
  std::uint64_t inside = 0;
  for (double z : zeta)
    if (z > center - half && z < center + half) ++inside;
  const double p_inside = static_cast<double>(inside) / (zeta.size() - truncated);
  const double med_dev = std::abs(med[0].value / (x * x * x) - tau);
  const bool ok = med_dev <= tau / 2.0 && p_inside >= 0.5 && truncated == 0;
  const double secs = timer.seconds();
  report(7, "extinction-time concentration at x = 7", ok && secs < 3600.0,
         fmt("median = %.2f (tau x^3 = %.2f), |med/x^3 - tau| = %.4f <= %.4f, "
             "P(window) = %.3f; %.1fs (budget 3600s)",
             med[0].value, center, med_dev, tau / 2.0, p_inside, secs));
}

// 8. Boundary-hit counts: supermartingale bound on E[R_{0,t/2}] and the
//    second-moment ratio E[R^2_{t/3,2t/3}]/h(0,x) <= 50.
void criterion_8() {
  Timer timer;
  estimators::RunOptions opt;
  opt.workers = workers();
  const double t = 8.0;
  const Barrier barrier = Barrier::curved(t);
  const double x = barrier.level(0.0) - 0.5;

  const auto first = estimators::estimate_hits(x, t, 0.0, t / 2.0, 10000, sub_seed(8), opt);
  const double Lu = barrier.level(t / 2.0);
  const double bound = x * std::exp(kSqrt2 * x) * std::exp(-kSqrt2 * Lu) / Lu;

  const auto second =
      estimators::estimate_hits(x, t, t / 3.0, 2.0 * t / 3.0, 10000, sub_seed(8, 1), opt);
  const bool ok = first.mean_hits.mean <= bound && second.ratio_second_to_h <= 50.0;
  const double secs = timer.seconds();
  report(8, "hit-count mean bound and second-moment ratio", ok,
         fmt("E[R_{0,t/2}] = %.3f <= %.3f; E[R^2]/h = %.1f <= 50; %.1fs",
             first.mean_hits.mean, bound, second.ratio_second_to_h, secs));
}

// 9. Neveu hit counts: E[K(1)] = e^{sqrt2}; y e^{-sqrt2 y} K(y) grows in y.
void criterion_9() {
  Timer timer;
  const auto k1 = estimators::estimate_neveu(1.0, 1e18, 100000, sub_seed(9), 10000000,
                                             workers());
  const double z = (k1.k_mean.mean - k1.expected_k) / k1.k_mean.stderr_;
  const auto k2 = estimators::estimate_neveu(2.0, 1e18, 100000, sub_seed(9, 1), 10000000,
                                             workers());
  const auto k3 = estimators::estimate_neveu(3.0, 1e18, 100000, sub_seed(9, 2), 10000000,
                                             workers());
  const bool growing = k1.scaled_mean.mean < k2.scaled_mean.mean &&
                       k2.scaled_mean.mean < k3.scaled_mean.mean;
  const bool ok = std::abs(z) <= 3.0 && growing &&
                  k1.k_mean.truncated_count == 0;
  const double secs = timer.seconds();
  report(9, "Neveu counts: E[K(1)] and growth of y e^{-sqrt2 y} K(y)",
         ok && secs < 900.0,
         fmt("K(1) mean = %.3f vs %.3f (z = %+.2f); scaled means %.3f < %.3f < %.3f; "
             "%.1fs (budget 900s)",
             k1.k_mean.mean, k1.expected_k, z, k1.scaled_mean.mean, k2.scaled_mean.mean,
             k3.scaled_mean.mean, secs));
}

// 10. Galton-Watson bound never exceeds exact survival (1000 random laws).
void criterion_10() {
  Timer timer;
  CounterRng rng(sub_seed(10), 0, 0);
  int violations = 0;
  int tested = 0;
  while (tested < 1000) {
    estimators::OffspringLaw law;
    double sum = 0.0;
    for (int k = 0; k < 6; ++k) {
      law.p.push_back(rng.next_double());
      sum += law.p.back();
    }
    for (auto& p : law.p) p /= sum;
    if (law.mean() <= 1.0 + 1e-9) continue;
    ++tested;
    const double bound =
        estimators::gw_survival_lower_bound(law.mean(), law.factorial_moment());
    const double survival = 1.0 - estimators::gw_extinction(law, 1e-12);
    if (bound > survival + 1e-9) ++violations;
  }
  const double secs = timer.seconds();
  report(10, "GW survival bound vs exact fixed point", violations == 0 && secs < 60.0,
         fmt("1000 supercritical laws, %d violations; %.1fs (budget 60s)", violations,
             secs));
}

// 11. Survival starting on the boundary, x = c t^{1/3}.
void criterion_11() {
  Timer timer;
  estimators::RunOptions opt;
  opt.step_cap = 8.0;
  opt.workers = workers();
  bool ok = true;
  std::string detail;
  for (double t : {8.0, 16.0}) {
    const double x = analytic::constants().c * std::cbrt(t);
    const auto est = estimators::estimate_survival(x, t, false, 10000,
                                                   sub_seed(11, t > 8.0 ? 1 : 0), opt);
    if (!(est.mean >= 0.05 && est.ci_low > 0.01)) ok = false;
    detail += fmt("t=%g: p = %.4f (ci_low %.4f)  ", t, est.mean, est.ci_low);
  }
  const double secs = timer.seconds();
  report(11, "survival from the boundary start x = c t^{1/3}", ok,
         detail + fmt("%.1fs", secs));
}

// 12. Discretization robustness: halving the step caps moves the criterion
//     3 and 6 estimates by less than one standard error.
void criterion_12() {
  Timer timer;
  const auto m_half = run_m_martingale(4.0, 0.05);
  const auto s_half = run_theorem1(4.0, 0.05);
  bool ok = true;
  double worst = 0.0;
  for (std::size_t j = 0; j < m_half.means.size(); ++j) {
    const double shift =
        std::abs(m_half.means[j] - g_c3_baseline.means[j]) / g_c3_baseline.stderrs[j];
    worst = std::max(worst, shift);
    if (shift >= 1.0) ok = false;
  }
  for (std::size_t j = 0; j < s_half.size(); ++j) {
    const double shift =
        std::abs(s_half[j].est.mean - g_c6_baseline[j].est.mean) /
        g_c6_baseline[j].est.stderr_;
    worst = std::max(worst, shift);
    if (shift >= 1.0) ok = false;
  }
  const double secs = timer.seconds();
  report(12, "halving step caps shifts criteria 3/6 by < 1 stderr", ok,
         fmt("max shift = %.3f stderr; %.1fs", worst, secs));
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) only = std::atoi(argv[i + 1]);

  using Fn = void (*)();
  const Fn criteria[] = {criterion_1, criterion_2, criterion_3,  criterion_4,
                         criterion_5, criterion_6, criterion_7,  criterion_8,
                         criterion_9, criterion_10, criterion_11, criterion_12};
  if (only > 0 && only <= 12) {
    if (only == 12) {
      criterion_3();
      criterion_6();
    }
    criteria[only - 1]();
  } else {
    for (Fn fn : criteria) fn();
  }
  if (g_failures == 0)
    std::printf("all criteria passed\n");
  else
    std::printf("%d criteria failed\n", g_failures);
  return g_failures;
}
