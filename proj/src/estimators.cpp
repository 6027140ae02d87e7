#include "bbmabs/estimators.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <thread>

#include <boost/math/distributions/beta.hpp>

#include "bbmabs/analytic.hpp"
#include "bbmabs/diagnostics.hpp"
#include "bbmabs/rng.hpp"

namespace bbmabs::estimators {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kZ95 = 1.959963984540054;  // 97.5% normal quantile

// Runs fn(i) for i in [0,n).  fn must only write to per-replicate slots, so
// results do not depend on the worker count or on scheduling.
template <class F>
void run_replicates(std::uint64_t n, int workers, F&& fn) {
  const int w = std::max(1, workers);
  if (w == 1 || n < 2) {
    for (std::uint64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  const std::uint64_t chunk = std::max<std::uint64_t>(1, n / (8ull * w));
  auto body = [&] {
    for (;;) {
      const std::uint64_t begin = next.fetch_add(chunk);
      if (begin >= n) return;
      const std::uint64_t end = std::min(n, begin + chunk);
      for (std::uint64_t i = begin; i < end; ++i) fn(i);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(w - 1);
  for (int i = 1; i < w; ++i) pool.emplace_back(body);
  body();
  for (auto& th : pool) th.join();
}

double beta_quantile(double prob, double a, double b) {
  return boost::math::quantile(boost::math::beta_distribution<double>(a, b), prob);
}

}  // namespace

EstimateResult summarize_mean(std::span<const double> values, std::uint64_t seed,
                              std::uint64_t truncated_count) {
  EstimateResult r;
  r.seed = seed;
  r.truncated_count = truncated_count;
  r.n_replicates = values.size();
  if (values.empty()) return r;
  double sum = 0.0;
  for (double v : values) sum += v;
  r.mean = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - r.mean) * (v - r.mean);
  if (values.size() > 1)
    r.stderr_ = std::sqrt(ss / (static_cast<double>(values.size()) - 1.0) /
                          static_cast<double>(values.size()));
  r.ci_low = r.mean - kZ95 * r.stderr_;
  r.ci_high = r.mean + kZ95 * r.stderr_;
  return r;
}

EstimateResult summarize_proportion(std::uint64_t successes, std::uint64_t n,
                                    std::uint64_t seed, std::uint64_t truncated_count) {
  EstimateResult r;
  r.seed = seed;
  r.truncated_count = truncated_count;
  r.n_replicates = n;
  if (n == 0) return r;
  const double m = static_cast<double>(n);
  const double k = static_cast<double>(successes);
  r.mean = k / m;
  r.stderr_ = std::sqrt(r.mean * (1.0 - r.mean) / m);
  const std::uint64_t failures = n - successes;
  if (successes < 30 || failures < 30) {
    // Exact binomial interval; the normal one is invalid in the rare-event
    // regime where these estimates are actually used.
    r.ci_low = successes == 0 ? 0.0 : beta_quantile(0.025, k, m - k + 1.0);
    r.ci_high = successes == n ? 1.0 : beta_quantile(0.975, k + 1.0, m - k);
  } else {
    r.ci_low = r.mean - kZ95 * r.stderr_;
    r.ci_high = r.mean + kZ95 * r.stderr_;
  }
  return r;
}

namespace {

engine::SimConfig base_config(double x, double t, const RunOptions& opt) {
  engine::SimConfig cfg;
  cfg.initial = {x};
  cfg.t_max = t;
  cfg.step_cap = opt.step_cap;
  cfg.step_frac = opt.step_frac;
  cfg.particle_cap = opt.particle_cap;
  return cfg;
}

}  // namespace

EstimateResult estimate_survival(double x, double t, bool barrier, std::uint64_t n,
                                 std::uint64_t seed, const RunOptions& opt) {
  if (!(x > 0.0)) throw std::domain_error("estimate_survival: x must be positive");
  if (n < 1) throw std::domain_error("estimate_survival: n must be >= 1");
  const engine::SimConfig cfg = base_config(x, t, opt);
  const std::optional<Barrier> b =
      barrier ? std::optional<Barrier>(Barrier::curved(t)) : std::nullopt;

  std::vector<std::uint8_t> status(n);  // 0 extinct, 1 survivor, 2 truncated
  run_replicates(n, opt.workers, [&](std::uint64_t i) {
    const auto out = engine::run(cfg, b, seed, i);
    status[i] = out.truncated ? 2 : (out.extinct ? 0 : 1);
  });
  std::uint64_t survivors = 0;
  std::uint64_t truncated = 0;
  for (auto sts : status) {
    if (sts == 2)
      ++truncated;
    else if (sts == 1)
      ++survivors;
  }
  return summarize_proportion(survivors, n - truncated, seed, truncated);
}

std::vector<double> extinction_times(double x, std::uint64_t n, std::uint64_t seed,
                                     const RunOptions& opt, std::uint64_t* truncated_out) {
  if (!(x > 0.0)) throw std::domain_error("extinction_times: x must be positive");
  const double tau = analytic::constants().tau;
  // Horizon far beyond the extinction-time scale tau*x^3; survival past it
  // has vanishing probability, and such replicates would be flagged anyway.
  const double horizon = std::max(1000.0, 100.0 * tau * x * x * x);
  engine::SimConfig cfg = base_config(x, horizon, opt);

  std::vector<double> zeta(n);
  run_replicates(n, opt.workers, [&](std::uint64_t i) {
    const auto out = engine::run(cfg, std::nullopt, seed, i);
    zeta[i] = (out.truncated || !out.extinct) ? kInf : out.zeta;
  });
  if (truncated_out) {
    std::uint64_t bad = 0;
    for (double z : zeta)
      if (z == kInf) ++bad;
    *truncated_out = bad;
  }
  return zeta;
}

std::vector<QuantileEstimate> quantiles_from_samples(std::span<const double> zeta,
                                                     std::span<const double> quantiles,
                                                     std::uint64_t seed) {
  const std::uint64_t n = zeta.size();
  if (n == 0) throw std::domain_error("quantiles_from_samples: no samples");
  for (double q : quantiles)
    if (!(q > 0.0 && q < 1.0))
      throw std::domain_error("quantiles_from_samples: quantiles must lie in (0,1)");
  std::vector<double> sorted(zeta.begin(), zeta.end());
  std::sort(sorted.begin(), sorted.end());
  const std::uint64_t bad =
      sorted.end() - std::lower_bound(sorted.begin(), sorted.end(), kInf);

  const auto quantile_of = [](const std::vector<double>& v, double q) {
    const double pos = q * (static_cast<double>(v.size()) - 1.0);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(v.size() - 1, lo + 1);
    const double w = pos - static_cast<double>(lo);
    return (1.0 - w) * v[lo] + w * v[hi];
  };

  std::vector<QuantileEstimate> out;
  CounterRng boot_rng(split_seed(seed, 0xB007), 0, 0);
  constexpr int kResamples = 1000;
  for (double q : quantiles) {
    const double hi_index = std::ceil(q * (static_cast<double>(n) - 1.0));
    if (bad > 0 && hi_index >= static_cast<double>(n - bad))
      throw std::runtime_error(
          "quantiles_from_samples: quantile straddles truncated replicates");
    QuantileEstimate est;
    est.q = q;
    est.value = quantile_of(sorted, q);
    std::vector<double> boots(kResamples);
    std::vector<double> resample(n);
    for (int b = 0; b < kResamples; ++b) {
      for (std::uint64_t i = 0; i < n; ++i)
        resample[i] = sorted[static_cast<std::uint64_t>(boot_rng.next_double() * n) % n];
      std::sort(resample.begin(), resample.end());
      boots[b] = quantile_of(resample, q);
    }
    std::sort(boots.begin(), boots.end());
    est.ci_low = boots[static_cast<std::size_t>(0.025 * (kResamples - 1))];
    est.ci_high = boots[static_cast<std::size_t>(0.975 * (kResamples - 1))];
    out.push_back(est);
  }
  return out;
}

std::vector<QuantileEstimate> estimate_extinction_quantiles(double x,
                                                            std::span<const double> quantiles,
                                                            std::uint64_t n, std::uint64_t seed,
                                                            const RunOptions& opt) {
  const auto zeta = extinction_times(x, n, seed, opt);
  return quantiles_from_samples(zeta, quantiles, seed);
}

HitsEstimate estimate_hits(double x, double t, double s, double u, std::uint64_t n,
                           std::uint64_t seed, const RunOptions& opt) {
  if (!(0.0 <= s && s < u && u <= t)) throw std::domain_error("estimate_hits: need 0 <= s < u <= t");
  const Barrier b = Barrier::curved(t);
  const double L0 = b.level(0.0);
  if (!(x > 0.0) || !(x < L0)) throw std::domain_error("estimate_hits: x must lie in (0, L(0))");
  engine::SimConfig cfg = base_config(x, u, opt);

  std::vector<double> counts(n);
  std::vector<std::uint8_t> trunc(n);
  run_replicates(n, opt.workers, [&](std::uint64_t i) {
    const auto out = engine::run(cfg, b, seed, i);
    trunc[i] = out.truncated;
    double r = 0.0;
    for (const auto& hit : out.hits)
      if (hit.time >= s && hit.time <= u) r += 1.0;
    counts[i] = r;
  });

  std::vector<double> kept;
  kept.reserve(n);
  std::uint64_t truncated = 0;
  std::uint64_t positive = 0;
  double sq = 0.0;
  for (std::uint64_t i = 0; i < n; ++i) {
    if (trunc[i]) {
      ++truncated;
      continue;
    }
    kept.push_back(counts[i]);
    if (counts[i] > 0.0) ++positive;
    sq += counts[i] * counts[i];
  }

  HitsEstimate est;
  est.mean_hits = summarize_mean(kept, seed, truncated);
  est.prob_positive = summarize_proportion(positive, kept.size(), seed, truncated);
  est.second_moment = kept.empty() ? 0.0 : sq / static_cast<double>(kept.size());
  est.h0 = analytic::h_shape(0.0, x, t);
  est.ratio_mean_to_h = est.mean_hits.mean / est.h0;
  est.ratio_prob_to_h = est.prob_positive.mean / est.h0;
  est.ratio_second_to_h = est.second_moment / est.h0;
  return est;
}

std::vector<EzRatioPoint> ez_ratio(double x, double t, std::span<const double> s_list,
                                   std::uint64_t n, std::uint64_t seed, const RunOptions& opt) {
  const Barrier b = Barrier::curved(t);
  const double L0 = b.level(0.0);
  if (!(x > 0.0) || !(x < L0)) throw std::domain_error("ez_ratio: x must lie in (0, L(0))");
  for (std::size_t i = 0; i < s_list.size(); ++i) {
    if (!(s_list[i] > 0.0 && s_list[i] < t))
      throw std::domain_error("ez_ratio: s values must lie in (0, t)");
    if (i > 0 && !(s_list[i] > s_list[i - 1]))
      throw std::domain_error("ez_ratio: s values must be increasing");
  }
  engine::SimConfig cfg = base_config(x, s_list.back(), opt);
  cfg.checkpoint_times.assign(s_list.begin(), s_list.end());

  const std::size_t ns = s_list.size();
  std::vector<double> z(n * ns);
  run_replicates(n, opt.workers, [&](std::uint64_t i) {
    const auto out = engine::run(cfg, b, seed, i);
    for (std::size_t j = 0; j < ns; ++j) z[i * ns + j] = out.checkpoints[j].z;
  });

  const double z0 = engine::z_statistic(std::vector<double>{x}, L0);
  std::vector<EzRatioPoint> out;
  std::vector<double> col(n);
  for (std::size_t j = 0; j < ns; ++j) {
    for (std::uint64_t i = 0; i < n; ++i) col[i] = z[i * ns + j];
    const auto m = summarize_mean(col, seed, 0);
    const double denom = z0 * analytic::b_inv(0.0, s_list[j], t);
    EzRatioPoint pt;
    pt.s = s_list[j];
    pt.ratio = m.mean / denom;
    pt.ci_low = m.ci_low / denom;
    pt.ci_high = m.ci_high / denom;
    pt.log_ratio_scaled = std::abs(std::log(pt.ratio)) * std::cbrt(t - s_list[j]);
    out.push_back(pt);
  }
  return out;
}

std::vector<DensityBin> density_compare(double x, double s, const Barrier& barrier, int bins,
                                        std::uint64_t n, std::uint64_t seed,
                                        const RunOptions& opt) {
  if (bins < 1) throw std::domain_error("density_compare: bins must be >= 1");
  if (!(s > 0.0)) throw std::domain_error("density_compare: s must be positive");
  const double L0 = barrier.level(0.0);
  if (!(x > 0.0) || !(x < L0))
    throw std::domain_error("density_compare: x must lie in (0, L(0))");
  const double Ls = barrier.level(s);
  if (!(Ls > 0.0)) throw std::domain_error("density_compare: barrier vanishes before s");

  engine::SimConfig cfg = base_config(x, s, opt);
  cfg.checkpoint_times = {s};
  cfg.record_positions = true;

  const double width = Ls / bins;
  // Integer accumulators commute exactly, so atomics keep the result
  // deterministic regardless of scheduling.
  std::vector<std::atomic<std::uint64_t>> count(bins);
  std::vector<std::atomic<std::uint64_t>> count_sq(bins);
  std::atomic<std::uint64_t> truncated{0};
  run_replicates(n, opt.workers, [&](std::uint64_t i) {
    const auto out = engine::run(cfg, barrier, seed, i);
    if (out.truncated) {
      truncated.fetch_add(1, std::memory_order_relaxed);
      return;
    }
    std::vector<std::uint32_t> local(bins, 0);
    for (double pos : out.checkpoints[0].positions) {
      const int bi = std::min(bins - 1, static_cast<int>(pos / width));
      local[bi] += 1;
    }
    for (int bi = 0; bi < bins; ++bi) {
      if (local[bi]) {
        count[bi].fetch_add(local[bi], std::memory_order_relaxed);
        count_sq[bi].fetch_add(std::uint64_t{local[bi]} * local[bi],
                               std::memory_order_relaxed);
      }
    }
  });

  const std::uint64_t kept = n - truncated.load();
  const double t_curved = barrier.is_curved() ? barrier.domain_end() : 0.0;
  std::vector<DensityBin> out;
  for (int bi = 0; bi < bins; ++bi) {
    DensityBin row;
    row.y_lo = bi * width;
    row.y_hi = (bi + 1) * width;
    row.y_mid = 0.5 * (row.y_lo + row.y_hi);
    row.count = count[bi].load();
    const double m = static_cast<double>(kept);
    const double mean_count = static_cast<double>(row.count) / m;
    row.q_hat = mean_count / width;
    const double var =
        (static_cast<double>(count_sq[bi].load()) - m * mean_count * mean_count) /
        std::max(1.0, m - 1.0);
    row.q_stderr = std::sqrt(var / m) / width;
    row.reference = barrier.is_constant()
                        ? analytic::strip_density_principal(s, x, row.y_mid, Ls)
                        : analytic::psi(0.0, s, x, row.y_mid, t_curved);
    row.ratio = row.q_hat / row.reference;
    row.sufficient = row.count >= 100;
    out.push_back(row);
  }
  return out;
}

BridgeMcEstimate bridge_crossing_mc(double x, double y, double t, analytic::LineBoundary line,
                                    bool above, std::uint64_t steps, std::uint64_t paths,
                                    std::uint64_t seed, int workers) {
  if (!(t > 0.0)) throw std::domain_error("bridge_crossing_mc: t must be positive");
  if (steps < 8 || steps % 4 != 0)
    throw std::domain_error("bridge_crossing_mc: steps must be a multiple of 4, >= 8");
  if (paths < 2) throw std::domain_error("bridge_crossing_mc: need at least 2 paths");

  // Per path: crossing indicator on the fine grid and on the 4x-coarser
  // subsample of the same points; d = 2*fine - coarse has mean ~ the exact
  // probability (the sqrt(dt) monitoring bias cancels).
  //
  // Work in line-relative coordinates with the 'below' case mirrored: the
  // distance to the line is itself a Brownian bridge from x0 to y0, and the
  // inner loop tests a plain sign.  Step coefficients are path-independent
  // and precomputed.
  const double flip = above ? 1.0 : -1.0;
  const double x0 = flip * (x - line.a);
  const double y0 = flip * (y - line.a - line.b * t);
  const double dt = t / static_cast<double>(steps);
  std::vector<double> w(steps), sd(steps);
  for (std::uint64_t k = 0; k < steps; ++k) {
    const double remaining = t - static_cast<double>(k) * dt;
    w[k] = dt / remaining;
    sd[k] = std::sqrt(std::max(0.0, dt * (remaining - dt) / remaining));
  }

  std::vector<std::int8_t> d(paths);
  run_replicates(paths, workers, [&](std::uint64_t i) {
    SplitMix64Rng rng(split_seed(seed, i));
    const ZigguratNormal normal;
    double pos = x0;
    bool fine = x0 >= 0.0;
    bool coarse = fine;
    for (std::uint64_t k = 0; k < steps; ++k) {
      pos += (y0 - pos) * w[k] + sd[k] * normal(rng);
      if (pos >= 0.0) {
        fine = true;
        if ((k + 1) % 4 == 0) coarse = true;
      }
    }
    d[i] = static_cast<std::int8_t>(2 * (fine ? 1 : 0) - (coarse ? 1 : 0));
  });

  BridgeMcEstimate est;
  est.steps = steps;
  est.paths = paths;
  double sum = 0.0;
  double sum_fine = 0.0;
  for (auto v : d) {
    sum += v;
    sum_fine += v > 0 ? 1.0 : 0.0;  // d > 0 iff the fine grid crossed
  }
  const double m = static_cast<double>(paths);
  est.mean = sum / m;
  est.fine = sum_fine / m;
  double ss = 0.0;
  for (auto v : d) ss += (v - est.mean) * (v - est.mean);
  est.stderr_ = std::sqrt(ss / (m - 1.0) / m);
  return est;
}

VMartingaleEstimate estimate_v_martingale(double x, double t, double dt, double s_eval,
                                          std::uint64_t n, std::uint64_t seed, int workers) {
  if (!(s_eval > 0.0 && s_eval < t))
    throw std::domain_error("estimate_v_martingale: s_eval must lie in (0, t)");
  const double record[2] = {0.0, s_eval};
  std::vector<double> v(n);
  std::vector<double> v0(n);
  run_replicates(n, workers, [&](std::uint64_t i) {
    const auto rows = diagnostics::simulate_v_path(x, t, dt, seed, i, record);
    v0[i] = rows.front().v_val;
    v[i] = rows.back().v_val;
  });
  VMartingaleEstimate est;
  est.s_eval = s_eval;
  est.v0 = v0.empty() ? 0.0 : v0.front();  // deterministic: no randomness at s = 0
  {
    const double c = analytic::constants().c;
    const double L0 = c * std::cbrt(t);
    est.g0 = est.v0 / std::sin(std::numbers::pi * x / L0);
  }
  est.v_mean = summarize_mean(v, seed, 0);
  return est;
}

NeveuEstimate estimate_neveu(double y, double zeta, std::uint64_t n, std::uint64_t seed,
                             std::uint64_t cap, int workers) {
  std::vector<double> k(n);
  std::vector<std::uint8_t> trunc(n);
  run_replicates(n, workers, [&](std::uint64_t i) {
    const auto res = diagnostics::neveu_run(y, zeta, seed, i, cap);
    trunc[i] = res.truncated;
    k[i] = static_cast<double>(res.k);
  });
  std::vector<double> kept;
  kept.reserve(n);
  std::uint64_t truncated = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    if (trunc[i])
      ++truncated;
    else
      kept.push_back(k[i]);
  }
  NeveuEstimate est;
  est.k_mean = summarize_mean(kept, seed, truncated);
  std::vector<double> scaled(kept);
  const double factor = y * std::exp(-std::numbers::sqrt2 * y);
  for (auto& v : scaled) v *= factor;
  est.scaled_mean = summarize_mean(scaled, seed, truncated);
  est.expected_k = std::exp(std::numbers::sqrt2 * y);
  return est;
}

std::vector<EstimateResult> estimate_m_at(double x, std::span<const double> times,
                                          std::uint64_t n, std::uint64_t seed,
                                          const RunOptions& opt) {
  engine::SimConfig cfg = base_config(x, times.back(), opt);
  cfg.checkpoint_times.assign(times.begin(), times.end());
  cfg.record_positions = true;

  const std::size_t nt = times.size();
  std::vector<double> m(n * nt);
  run_replicates(n, opt.workers, [&](std::uint64_t i) {
    const auto out = engine::run(cfg, std::nullopt, seed, i);
    for (std::size_t j = 0; j < nt; ++j)
      m[i * nt + j] = engine::m_statistic(out.checkpoints[j].positions);
  });
  std::vector<EstimateResult> out;
  std::vector<double> col(n);
  for (std::size_t j = 0; j < nt; ++j) {
    for (std::uint64_t i = 0; i < n; ++i) col[i] = m[i * nt + j];
    out.push_back(summarize_mean(col, seed, 0));
  }
  return out;
}

double OffspringLaw::mean() const {
  double m = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) m += static_cast<double>(k) * p[k];
  return m;
}

double OffspringLaw::factorial_moment() const {
  double m = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k)
    m += static_cast<double>(k) * (static_cast<double>(k) - 1.0) * p[k];
  return m;
}

OffspringLaw poisson_law(double lambda) {
  if (!(lambda > 0.0)) throw std::domain_error("poisson_law: lambda must be positive");
  OffspringLaw law;
  double pk = std::exp(-lambda);
  double cum = pk;
  law.p.push_back(pk);
  for (std::size_t k = 1; k < 400; ++k) {
    pk *= lambda / static_cast<double>(k);
    law.p.push_back(pk);
    cum += pk;
    if (1.0 - cum < 1e-15 && static_cast<double>(k) > 3.0 * lambda + 20.0) break;
  }
  return law;
}

double gw_extinction(const OffspringLaw& law, double tol) {
  if (!(tol > 0.0)) throw std::domain_error("gw_extinction: tol must be positive");
  double sum = 0.0;
  for (double pk : law.p) {
    if (pk < 0.0) throw std::domain_error("gw_extinction: probabilities must be >= 0");
    sum += pk;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::domain_error("gw_extinction: probabilities must sum to 1");

  const double mean = law.mean();
  const bool degenerate = law.p.size() > 1 && law.p[1] == 1.0;
  if (mean <= 1.0 && !degenerate) return 1.0;

  const auto phi = [&](double q) {
    double v = 0.0;
    for (std::size_t k = law.p.size(); k-- > 0;) v = v * q + law.p[k];
    return v;
  };
  double q = 0.0;
  for (int it = 0; it < 1'000'000; ++it) {
    const double next = phi(q);
    if (std::abs(next - q) < tol) return next;
    q = next;
  }
  throw std::runtime_error("gw_extinction: fixed-point iteration did not converge");
}

double gw_survival_lower_bound(double mean, double factorial_moment) {
  if (!(mean > 1.0)) throw std::domain_error("gw_survival_lower_bound: mean must exceed 1");
  if (!(factorial_moment > 0.0))
    throw std::domain_error("gw_survival_lower_bound: factorial moment must be positive");
  return std::clamp(2.0 * (mean - 1.0) / factorial_moment, 0.0, 1.0);
}

}  // namespace bbmabs::estimators
