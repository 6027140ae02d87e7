#include "bbmabs/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bbmabs/rng.hpp"

namespace bbmabs::engine {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kPi = std::numbers::pi;

// Absolute floor on the soft step caps; keeps the curved-barrier endgame
// (L(s) -> 0) from degenerating into an unbounded number of steps.
constexpr double kStepFloor = 1e-9;

struct Pending {
  std::uint64_t id;
  double birth;
  double pos;
};

void validate(const SimConfig& cfg, const std::optional<Barrier>& barrier) {
  if (!(cfg.mu >= 0.0)) throw std::invalid_argument("run: mu must be >= 0");
  if (!(cfg.branch_rate >= 0.0)) throw std::invalid_argument("run: branch_rate must be >= 0");
  if (!(cfg.t_max >= 0.0)) throw std::invalid_argument("run: t_max must be >= 0");
  if (!(cfg.step_cap > 0.0)) throw std::invalid_argument("run: step_cap must be positive");
  if (!(cfg.step_frac > 0.0 && cfg.step_frac <= 0.5))
    throw std::invalid_argument("run: step_frac must lie in (0, 1/2]");
  if (cfg.particle_cap < 1 || cfg.particle_cap > 0xFFFFFFFFull)
    throw std::invalid_argument("run: particle_cap must lie in [1, 2^32)");
  for (std::size_t i = 0; i < cfg.checkpoint_times.size(); ++i) {
    const double s = cfg.checkpoint_times[i];
    if (s < 0.0 || s > cfg.t_max)
      throw std::invalid_argument("run: checkpoint outside [0, t_max]");
    if (i > 0 && !(s > cfg.checkpoint_times[i - 1]))
      throw std::invalid_argument("run: checkpoints must be strictly increasing");
  }
  const double L0 = barrier ? barrier->level(0.0) : kInf;
  for (double x : cfg.initial) {
    if (cfg.absorb_origin && !(x > 0.0))
      throw std::invalid_argument("run: initial positions must be positive");
    if (barrier && !(x < L0))
      throw std::invalid_argument("run: initial positions must lie below the barrier");
  }
  // A curved barrier with origin absorption clears every particle by t_end,
  // so a shorter barrier domain is fine there; otherwise the barrier must
  // cover the whole horizon.
  if (barrier && barrier->domain_end() < cfg.t_max &&
      !(barrier->is_curved() && cfg.absorb_origin))
    throw std::invalid_argument("run: barrier undefined before t_max");
}

struct CheckAcc {
  std::uint64_t n = 0;
  double z = 0.0;
  std::vector<double> positions;
};

}  // namespace

double z_statistic(std::span<const double> positions, double L) {
  if (!(L > 0.0)) throw std::domain_error("z_statistic: L must be positive");
  double z = 0.0;
  for (double x : positions) {
    if (!(x > 0.0) || !(x < L))
      throw std::domain_error("z_statistic: positions must lie in (0, L)");
    z += std::exp(kSqrt2 * x) * std::sin(kPi * x / L);
  }
  return z;
}

double m_statistic(std::span<const double> positions) {
  double m = 0.0;
  for (double x : positions) {
    if (x < 0.0) throw std::domain_error("m_statistic: positions must be >= 0");
    m += x * std::exp(kSqrt2 * x);
  }
  return m;
}

Outcome run(const SimConfig& cfg, const std::optional<Barrier>& barrier, std::uint64_t seed,
            std::uint64_t replicate) {
  validate(cfg, barrier);

  const std::size_t ncp = cfg.checkpoint_times.size();
  std::vector<CheckAcc> cps(ncp);
  const double t_end_bar = barrier ? barrier->domain_end() : kInf;

  Outcome out;
  std::vector<std::pair<double, double>> spans;  // (birth, death-or-horizon) per particle
  bool any_survivor = false;
  double last_death = 0.0;

  // Checkpoints at time zero see the initial configuration.
  std::size_t cp0 = 0;
  while (cp0 < ncp && cfg.checkpoint_times[cp0] == 0.0) {
    cps[cp0].n = cfg.initial.size();
    if (barrier) cps[cp0].z = z_statistic(cfg.initial, barrier->level(0.0));
    if (cfg.record_positions) cps[cp0].positions = cfg.initial;
    ++cp0;
  }

  std::vector<Pending> work;
  std::uint64_t created = 0;
  for (double x : cfg.initial) work.push_back({created++, 0.0, x});

  while (!work.empty()) {
    const Pending p = work.back();
    work.pop_back();
    CounterRng rng(seed, replicate, p.id);

    double s = p.birth;
    double pos = p.pos;
    double t_branch =
        cfg.branch_rate > 0.0 ? s + rng.next_exponential(cfg.branch_rate) : kInf;
    std::size_t cp_i =
        std::upper_bound(cfg.checkpoint_times.begin(), cfg.checkpoint_times.end(), s) -
        cfg.checkpoint_times.begin();

    bool alive = true;
    while (alive) {
      if (s >= cfg.t_max) {
        any_survivor = true;
        spans.emplace_back(p.birth, cfg.t_max);
        break;
      }
      const double next_cp = cp_i < ncp ? cfg.checkpoint_times[cp_i] : kInf;
      const double hard = std::min({cfg.t_max, t_branch, next_cp, t_end_bar,
                                    barrier ? barrier->next_knot_after(s) : kInf});
      double soft = cfg.step_cap;
      if (barrier) {
        const double Ls = barrier->level(s);
        soft = std::min(soft, Ls * Ls / 8.0);
        if (barrier->is_curved()) soft = std::min(soft, cfg.step_frac * (t_end_bar - s));
        soft = std::max(soft, kStepFloor);
      }
      const double target = std::min(hard, s + soft);
      const double dt = target - s;
      const double end = pos - cfg.mu * dt + std::sqrt(dt) * rng.next_normal();

      bool killed_origin = false;
      bool killed_boundary = false;
      if (cfg.absorb_origin) {
        if (end <= 0.0)
          killed_origin = true;
        else if (rng.next_double() < std::exp(-2.0 * pos * end / dt))
          killed_origin = true;
      }
      if (!killed_origin && barrier) {
        const double a = barrier->level(s);
        const double b_end = barrier->level(target);
        if (end >= b_end)
          killed_boundary = true;
        else if (rng.next_double() < std::exp(-2.0 * (a - pos) * (b_end - end) / dt))
          killed_boundary = true;
      }
      s = target;
      if (killed_origin || killed_boundary) {
        if (killed_boundary) out.hits.push_back({s, p.id});
        spans.emplace_back(p.birth, s);
        last_death = std::max(last_death, s);
        alive = false;
        break;
      }
      pos = end;

      if (cp_i < ncp && s == cfg.checkpoint_times[cp_i]) {
        auto& acc = cps[cp_i];
        acc.n += 1;
        if (barrier) acc.z += std::exp(kSqrt2 * pos) * std::sin(kPi * pos / barrier->level(s));
        if (cfg.record_positions) acc.positions.push_back(pos);
        ++cp_i;
      }
      if (s == t_branch) {
        if (created < cfg.particle_cap)
          work.push_back({created++, s, pos});
        else
          out.truncated = true;
        t_branch = s + rng.next_exponential(cfg.branch_rate);
      }
    }
  }

  out.extinct = !any_survivor;
  out.zeta = out.extinct ? last_death : kInf;

  // Peak live count: sweep birth/death events; births first at equal times.
  std::vector<std::pair<double, int>> events;
  events.reserve(2 * spans.size());
  for (const auto& sp : spans) {
    events.emplace_back(sp.first, +1);
    events.emplace_back(sp.second, -1);
  }
  std::sort(events.begin(), events.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second > b.second;
  });
  std::int64_t live = 0;
  std::int64_t peak = 0;
  for (const auto& e : events) {
    live += e.second;
    peak = std::max(peak, live);
  }
  out.max_live = static_cast<std::uint64_t>(peak);

  std::sort(out.hits.begin(), out.hits.end(), [](const HitRecord& a, const HitRecord& b) {
    if (a.time != b.time) return a.time < b.time;
    return a.particle_id < b.particle_id;
  });

  out.checkpoints.reserve(ncp);
  for (std::size_t i = 0; i < ncp; ++i)
    out.checkpoints.push_back({cfg.checkpoint_times[i], cps[i].n, cps[i].z,
                               std::move(cps[i].positions)});
  return out;
}

}  // namespace bbmabs::engine
