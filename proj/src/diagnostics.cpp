#include "bbmabs/diagnostics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "bbmabs/analytic.hpp"
#include "bbmabs/rng.hpp"

namespace bbmabs::diagnostics {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kSqrt2 = std::numbers::sqrt2;
}  // namespace

std::vector<PathFunctional> simulate_v_path(double x, double t, double dt, std::uint64_t seed,
                                            std::uint64_t replicate,
                                            std::span<const double> record_times) {
  const double c = analytic::constants().c;
  const double L0 = c * std::cbrt(t);
  if (!(x > 0.0) || !(x < L0))
    throw std::domain_error("simulate_v_path: x must lie in (0, c t^{1/3})");
  if (!(dt > 0.0) || dt > 1e-2) throw std::domain_error("simulate_v_path: need 0 < dt <= 1e-2");
  for (std::size_t i = 0; i < record_times.size(); ++i) {
    if (record_times[i] < 0.0 || record_times[i] >= t)
      throw std::domain_error("simulate_v_path: record times must lie in [0, t)");
    if (i > 0 && !(record_times[i] > record_times[i - 1]))
      throw std::domain_error("simulate_v_path: record times must be increasing");
  }

  const auto level = [&](double u) { return c * std::cbrt(t - u); };
  const auto dlevel = [&](double u) {
    const double g = t - u;
    return -(c / 3.0) / std::cbrt(g * g);
  };
  const auto ddlevel = [&](double u) {
    const double g = t - u;
    return -(2.0 * c / 9.0) / (g * std::cbrt(g * g));
  };

  CounterRng rng(seed, replicate, 0);
  std::vector<PathFunctional> out;

  double s = 0.0;
  double xi = x;
  bool alive = true;
  double i_xi = 0.0;   // int L' dxi (left point)
  double i_l2 = 0.0;   // int L'^2 du
  double i_pi = 0.0;   // int pi^2/(2L^2) du
  double i_ll = 0.0;   // int L'/(2L) du
  double i_c = 0.0;    // int (L''/2L)(xi - L/2)^2 du
  PathFunctional frozen{};  // functional values at the step the path died

  const auto evaluate = [&]() {
    if (!alive) {
      PathFunctional row = frozen;
      row.s = s;
      return row;
    }
    PathFunctional row;
    row.s = s;
    row.alive = true;
    row.a_val = std::exp(0.5 * i_xi - 0.125 * i_l2);
    row.b_val = std::exp(i_pi - i_ll);
    const double Ls = level(s);
    row.c_val = std::exp(dlevel(s) / (2.0 * Ls) * (xi - Ls / 2.0) * (xi - Ls / 2.0) - i_c);
    row.g_val = row.a_val * row.b_val * row.c_val;
    row.v_val = row.g_val * std::sin(kPi * xi / Ls);
    // Quadrature sanity check: 1/B must track the closed form.
    const double ref = analytic::b_inv(0.0, s, t);
    if (std::abs(1.0 / row.b_val / ref - 1.0) > 1e-6)
      throw std::runtime_error("simulate_v_path: quadrature for B drifted from closed form");
    return row;
  };

  const bool record_all = record_times.empty();
  std::size_t rt_i = 0;
  const auto due = [&]() {
    if (record_all) return true;
    return rt_i < record_times.size() && s >= record_times[rt_i] - 1e-12;
  };
  const auto emit_due = [&]() {
    if (record_all) {
      out.push_back(evaluate());
      return;
    }
    while (due()) {
      out.push_back(evaluate());
      ++rt_i;
    }
  };

  emit_due();
  const double s_end = record_all ? t - dt : (record_times.back() + dt);
  while (s + dt <= s_end + 1e-12 && (record_all || rt_i < record_times.size())) {
    const double s1 = s + dt;
    if (alive) {
      const double end = xi + std::sqrt(dt) * rng.next_normal();
      bool dead = false;
      if (end <= 0.0 || rng.next_double() < std::exp(-2.0 * xi * end / dt)) dead = true;
      if (!dead) {
        const double a = level(s);
        const double b_end = level(s1);
        if (end >= b_end ||
            rng.next_double() < std::exp(-2.0 * (a - xi) * (b_end - end) / dt))
          dead = true;
      }
      if (dead) {
        frozen = evaluate();
        frozen.alive = false;
        frozen.v_val = 0.0;
        alive = false;
      } else {
        const double um = s + 0.5 * dt;
        const double Lm = level(um);
        const double dLm = dlevel(um);
        const double xim = 0.5 * (xi + end);
        i_xi += dlevel(s) * (end - xi);
        i_l2 += dLm * dLm * dt;
        i_pi += kPi * kPi / (2.0 * Lm * Lm) * dt;
        i_ll += dLm / (2.0 * Lm) * dt;
        i_c += ddlevel(um) / (2.0 * Lm) * (xim - Lm / 2.0) * (xim - Lm / 2.0) * dt;
        xi = end;
      }
    }
    s = s1;
    emit_due();
  }
  return out;
}

NeveuResult neveu_run(double y, double zeta, std::uint64_t seed, std::uint64_t replicate,
                      std::uint64_t cap) {
  if (!(y > 0.0)) throw std::domain_error("neveu_run: y must be positive");
  if (!(zeta > 0.0)) throw std::domain_error("neveu_run: zeta must be positive (or inf)");
  if (cap < 1 || cap > 0xFFFFFFFFull)
    throw std::domain_error("neveu_run: cap must lie in [1, 2^32)");

  constexpr double kStep = 0.05;
  NeveuResult res{y, zeta, 0, 0, false};

  struct Pending {
    std::uint64_t id;
    double birth;
    double pos;
  };
  std::vector<Pending> work{{0, 0.0, 0.0}};
  std::uint64_t created = 1;

  while (!work.empty()) {
    const Pending p = work.back();
    work.pop_back();
    CounterRng rng(seed, replicate, p.id);
    double s = p.birth;
    double pos = p.pos;
    double t_branch = s + rng.next_exponential(1.0);
    for (;;) {
      const double target = std::min(t_branch, s + kStep);
      const double dt = target - s;
      const double end = pos - kSqrt2 * dt + std::sqrt(dt) * rng.next_normal();
      bool killed = false;
      if (end <= -y)
        killed = true;
      else if (rng.next_double() < std::exp(-2.0 * (pos + y) * (end + y) / dt))
        killed = true;
      s = target;
      if (killed) {
        res.k += 1;
        if (s <= zeta) res.k_zeta += 1;
        break;
      }
      pos = end;
      if (s == t_branch) {
        if (created < cap)
          work.push_back({created++, s, pos});
        else
          res.truncated = true;
        t_branch = s + rng.next_exponential(1.0);
      }
    }
  }
  return res;
}

}  // namespace bbmabs::diagnostics
