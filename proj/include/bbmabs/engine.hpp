#pragma once

#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "bbmabs/barrier.hpp"

namespace bbmabs::engine {

// One simulation run = branching Brownian motion with drift -mu, binary
// branching at branch_rate, absorption at the origin (optional) and at a
// right Barrier (optional), observed until t_max.
struct SimConfig {
  double mu = std::numbers::sqrt2;
  double branch_rate = 1.0;
  std::vector<double> initial;
  double t_max = 1.0;
  bool absorb_origin = true;
  double step_cap = 0.05;                  // max sub-step length (time)
  double step_frac = 0.1;                  // sub-step <= step_frac*(t_end - s), curved barriers
  std::uint64_t particle_cap = 1'000'000;  // cumulative particles per replicate
  std::vector<double> checkpoint_times;    // sorted, within [0, t_max]
  bool record_positions = false;
};

struct HitRecord {
  double time;  // absorption at the right boundary, recorded at sub-step end
  std::uint64_t particle_id;
};

struct Checkpoint {
  double s;
  std::uint64_t n;  // live particle count N(s)
  double z;         // Z(s) = sum e^{sqrt2 X_i} sin(pi X_i / L(s)); 0 without barrier
  std::vector<double> positions;
};

struct Outcome {
  bool extinct = false;
  double zeta = 0.0;  // extinction time; only meaningful when extinct
  std::vector<HitRecord> hits;
  std::vector<Checkpoint> checkpoints;
  std::uint64_t max_live = 0;
  bool truncated = false;  // particle cap was reached; branching was suppressed
};

// Deterministic function of (cfg, barrier, seed, replicate).
Outcome run(const SimConfig& cfg, const std::optional<Barrier>& barrier, std::uint64_t seed,
            std::uint64_t replicate);

// Z(s) for a configuration of positions inside (0, L).
double z_statistic(std::span<const double> positions, double L);

// M(s) = sum X_i e^{sqrt2 X_i}; martingale under origin-only absorption.
double m_statistic(std::span<const double> positions);

}  // namespace bbmabs::engine
