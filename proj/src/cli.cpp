#include "bbmabs/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "bbmabs/analytic.hpp"
#include "bbmabs/barrier.hpp"
#include "bbmabs/diagnostics.hpp"
#include "bbmabs/engine.hpp"
#include "bbmabs/estimators.hpp"
#include "bbmabs/io.hpp"

namespace bbmabs::cli {

namespace {

using estimators::EstimateResult;
using estimators::RunOptions;
using io::fmt;
using io::SpecEcho;
using io::Table;

struct AssertViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Options shared by every experiment subcommand.
struct Common {
  std::uint64_t n = 10000;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int workers = 1;
  std::string out;
  std::string format = "csv";
  bool assert_mode = false;
  bool dry_run = false;
  RunOptions opt;
};

void add_common(CLI::App* cmd, Common& c, std::uint64_t default_n) {
  c.n = default_n;
  cmd->add_option("--n", c.n, "replicates")->capture_default_str();
  cmd->add_option("--seed", c.seed, "64-bit RNG seed (default: random, printed)");
  cmd->add_option("--workers", c.workers, "worker threads")
      ->envname("BBM_ABS_WORKERS")
      ->capture_default_str();
  cmd->add_option("--out", c.out, "output file path");
  cmd->add_option("--format", c.format, "output format")
      ->check(CLI::IsMember({"csv", "jsonl"}))
      ->capture_default_str();
  cmd->add_flag("--assert", c.assert_mode, "turn declared windows into exit-code checks");
  cmd->add_flag("--dry-run", c.dry_run, "print the resolved spec and exit");
  cmd->add_option("--dmax", c.opt.step_cap, "max sub-step length")->capture_default_str();
  cmd->add_option("--eps", c.opt.step_frac, "relative step cap for curved barriers")
      ->capture_default_str();
  cmd->add_option("--particle-cap", c.opt.particle_cap, "particle cap per replicate")
      ->capture_default_str();
}

void finalize_seed(CLI::App* cmd, Common& c) {
  c.seed_given = cmd->count("--seed") > 0;
  if (!c.seed_given) {
    std::random_device rd;
    c.seed = (std::uint64_t{rd()} << 32) ^ rd();
  }
  c.opt.workers = c.workers;
}

void echo_common(SpecEcho& spec, const Common& c) {
  spec.emplace_back("n", fmt(c.n));
  spec.emplace_back("seed", fmt(c.seed));
  spec.emplace_back("dmax", fmt(c.opt.step_cap));
  spec.emplace_back("eps", fmt(c.opt.step_frac));
  spec.emplace_back("particle_cap", fmt(c.opt.particle_cap));
}

int emit(const Common& c, const SpecEcho& spec, const Table& table,
         const nlohmann::json& summary) {
  if (c.dry_run) {
    for (const auto& [k, v] : spec) std::cout << k << " = " << v << '\n';
    return 0;
  }
  if (!c.out.empty()) {
    std::ofstream os(c.out);
    if (!os) throw std::runtime_error("cannot open output file: " + c.out);
    if (c.format == "jsonl")
      io::write_table_jsonl(os, spec, table);
    else
      io::write_table_csv(os, spec, table);
  }
  std::cout << summary.dump() << '\n';
  return 0;
}

nlohmann::json spec_to_json(const SpecEcho& spec) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : spec) j[k] = v;
  return j;
}

nlohmann::json estimate_json(const EstimateResult& e) {
  return {{"mean", e.mean},       {"stderr", e.stderr_},
          {"ci_low", e.ci_low},   {"ci_high", e.ci_high},
          {"n", e.n_replicates},  {"truncated", e.truncated_count}};
}

void check_truncation(const EstimateResult& e, std::uint64_t n) {
  if (e.truncated_count * 1000 > n)
    throw AssertViolation("more than 0.1% of replicates were truncated");
}

// ---------------------------------------------------------------- commands

int cmd_bridge_test(Common& c, double x, double y, double t, double a, double b,
                    std::uint64_t steps) {
  const analytic::LineBoundary line{a, b};
  bool above;
  if (x < a && y < a + b * t)
    above = true;
  else if (x > a && y > a + b * t)
    above = false;
  else
    throw std::domain_error("bridge-test: endpoints must lie strictly on one side of the line");
  const double exact = above ? analytic::bridge_cross_above(x, y, t, line)
                             : analytic::bridge_cross_below(x, y, t, line);

  SpecEcho spec{{"command", "bridge-test"}, {"x", fmt(x)},     {"y", fmt(y)},
                {"t", fmt(t)},              {"a", fmt(a)},     {"b", fmt(b)},
                {"steps", fmt(steps)},      {"side", above ? "above" : "below"}};
  echo_common(spec, c);
  spec.emplace_back("window", "|z| <= 3");
  if (c.dry_run) return emit(c, spec, {}, {});

  const auto mc = estimators::bridge_crossing_mc(x, y, t, line, above, steps, c.n, c.seed,
                                                 c.workers);
  const double z = (mc.mean - exact) / mc.stderr_;

  Table table;
  table.columns = {"exact", "mc_mean", "mc_stderr", "mc_fine", "z"};
  table.add_row({fmt(exact), fmt(mc.mean), fmt(mc.stderr_), fmt(mc.fine), fmt(z)});
  nlohmann::json summary{{"command", "bridge-test"},
                         {"spec", spec_to_json(spec)},
                         {"exact", exact},
                         {"mc_mean", mc.mean},
                         {"mc_stderr", mc.stderr_},
                         {"z", z}};
  const int rc = emit(c, spec, table, summary);
  if (c.assert_mode && std::abs(z) > 3.0)
    throw AssertViolation("bridge-test: |z| > 3 between closed form and path oracle");
  return rc;
}

int cmd_survival(Common& c, double x, double t, bool with_barrier) {
  SpecEcho spec{{"command", "survival"},
                {"x", fmt(x)},
                {"t", fmt(t)},
                {"barrier", with_barrier ? "curved" : "none"}};
  echo_common(spec, c);
  spec.emplace_back("window", "ratio_to_shape in [0.1, 10]");
  if (c.dry_run) return emit(c, spec, {}, {});

  const auto est = estimators::estimate_survival(x, t, with_barrier, c.n, c.seed, c.opt);
  const double width = analytic::constants().c * std::cbrt(t);
  const bool shape_ok = x < width;
  const double shape = shape_ok ? analytic::survival_shape(x, t) : 0.0;
  const double ratio = shape_ok ? est.mean / shape : std::nan("");

  Table table;
  table.columns = {"x",       "t",      "barrier", "mean",          "stderr", "ci_low",
                   "ci_high", "n_used", "truncated", "shape",       "ratio"};
  table.add_row({fmt(x), fmt(t), with_barrier ? "curved" : "none", fmt(est.mean),
                 fmt(est.stderr_), fmt(est.ci_low), fmt(est.ci_high), fmt(est.n_replicates),
                 fmt(est.truncated_count), fmt(shape), fmt(ratio)});
  nlohmann::json summary{{"command", "survival"},
                         {"spec", spec_to_json(spec)},
                         {"estimate", estimate_json(est)},
                         {"shape", shape},
                         {"ratio_to_shape", ratio}};
  const int rc = emit(c, spec, table, summary);
  if (c.assert_mode) {
    check_truncation(est, c.n);
    if (!shape_ok) throw AssertViolation("survival: shape undefined at x >= c t^{1/3}");
    if (!(ratio >= 0.1 && ratio <= 10.0))
      throw AssertViolation("survival: ratio to shape outside [0.1, 10]");
  }
  return rc;
}

int cmd_extinction(Common& c, double x, std::vector<double> quantiles) {
  SpecEcho spec{{"command", "extinction"}, {"x", fmt(x)}};
  {
    std::string qs;
    for (std::size_t i = 0; i < quantiles.size(); ++i)
      qs += (i ? "," : "") + fmt(quantiles[i]);
    spec.emplace_back("quantiles", qs);
  }
  echo_common(spec, c);
  const double tau = analytic::constants().tau;
  const double center = tau * x * x * x;
  const double half = 3.0 * x * x;
  spec.emplace_back("window",
                    "|median/x^3 - tau| <= tau/2 and P(zeta in tau x^3 +- 3x^2) >= 0.5");
  if (c.dry_run) return emit(c, spec, {}, {});

  std::uint64_t truncated = 0;
  const auto zeta = estimators::extinction_times(x, c.n, c.seed, c.opt, &truncated);
  const auto qs = estimators::quantiles_from_samples(zeta, quantiles, c.seed);
  std::uint64_t in_window = 0;
  for (double z : zeta)
    if (z > center - half && z < center + half) ++in_window;
  const auto window_prob =
      estimators::summarize_proportion(in_window, c.n - truncated, c.seed, truncated);

  Table table;
  table.columns = {"q", "value", "ci_low", "ci_high"};
  for (const auto& q : qs)
    table.add_row({fmt(q.q), fmt(q.value), fmt(q.ci_low), fmt(q.ci_high)});
  nlohmann::json jq = nlohmann::json::array();
  for (const auto& q : qs)
    jq.push_back({{"q", q.q}, {"value", q.value}, {"ci_low", q.ci_low}, {"ci_high", q.ci_high}});
  nlohmann::json summary{{"command", "extinction"},
                         {"spec", spec_to_json(spec)},
                         {"quantiles", jq},
                         {"window_center", center},
                         {"window_half_width", half},
                         {"window_prob", estimate_json(window_prob)}};
  const int rc = emit(c, spec, table, summary);
  if (c.assert_mode) {
    check_truncation(window_prob, c.n);
    double median = std::nan("");
    for (const auto& q : qs)
      if (q.q == 0.5) median = q.value;
    if (std::isnan(median)) throw AssertViolation("extinction: median not among quantiles");
    if (!(std::abs(median / (x * x * x) - tau) <= tau / 2.0))
      throw AssertViolation("extinction: |median/x^3 - tau| > tau/2");
    if (!(window_prob.mean >= 0.5))
      throw AssertViolation("extinction: window probability below 0.5");
  }
  return rc;
}

int cmd_hits(Common& c, double x, double t, double s, double u) {
  SpecEcho spec{{"command", "hits"}, {"x", fmt(x)}, {"t", fmt(t)}, {"s", fmt(s)},
                {"u", fmt(u)}};
  echo_common(spec, c);
  spec.emplace_back("window", "mean <= supermartingale bound (s=0); E[R^2]/h <= 50");
  if (c.dry_run) return emit(c, spec, {}, {});

  const auto est = estimators::estimate_hits(x, t, s, u, c.n, c.seed, c.opt);
  const Barrier barrier = Barrier::curved(t);
  const double Lu = barrier.level(u);
  const double bound =
      Lu > 0.0 ? x * std::exp(std::numbers::sqrt2 * x) *
                     std::exp(-std::numbers::sqrt2 * Lu) / Lu
               : std::numeric_limits<double>::infinity();

  Table table;
  table.columns = {"mean",      "mean_ci_low", "mean_ci_high", "p_positive", "p_ci_low",
                   "p_ci_high", "second_moment", "h0",         "ratio_mean", "ratio_p",
                   "ratio_second", "bound_s0"};
  table.add_row({fmt(est.mean_hits.mean), fmt(est.mean_hits.ci_low),
                 fmt(est.mean_hits.ci_high), fmt(est.prob_positive.mean),
                 fmt(est.prob_positive.ci_low), fmt(est.prob_positive.ci_high),
                 fmt(est.second_moment), fmt(est.h0), fmt(est.ratio_mean_to_h),
                 fmt(est.ratio_prob_to_h), fmt(est.ratio_second_to_h), fmt(bound)});
  nlohmann::json summary{{"command", "hits"},
                         {"spec", spec_to_json(spec)},
                         {"mean_hits", estimate_json(est.mean_hits)},
                         {"prob_positive", estimate_json(est.prob_positive)},
                         {"second_moment", est.second_moment},
                         {"h0", est.h0},
                         {"ratio_mean_to_h", est.ratio_mean_to_h},
                         {"ratio_second_to_h", est.ratio_second_to_h},
                         {"bound_s0", bound}};
  const int rc = emit(c, spec, table, summary);
  if (c.assert_mode) {
    check_truncation(est.mean_hits, c.n);
    if (s == 0.0 && !(est.mean_hits.mean <= bound))
      throw AssertViolation("hits: mean exceeds the supermartingale bound");
    if (!(est.ratio_second_to_h <= 50.0))
      throw AssertViolation("hits: E[R^2]/h(0,x) exceeds 50");
  }
  return rc;
}

int cmd_ez_ratio(Common& c, double x, double t, std::vector<double> s_list) {
  SpecEcho spec{{"command", "ez-ratio"}, {"x", fmt(x)}, {"t", fmt(t)}};
  {
    std::string ss;
    for (std::size_t i = 0; i < s_list.size(); ++i) ss += (i ? "," : "") + fmt(s_list[i]);
    spec.emplace_back("s_list", ss);
  }
  echo_common(spec, c);
  spec.emplace_back("window", "max |log ratio| (t-s)^{1/3} <= 3");
  if (c.dry_run) return emit(c, spec, {}, {});

  const auto pts = estimators::ez_ratio(x, t, s_list, c.n, c.seed, c.opt);
  Table table;
  table.columns = {"s", "ratio", "ci_low", "ci_high", "log_ratio_scaled"};
  double worst = 0.0;
  nlohmann::json jr = nlohmann::json::array();
  for (const auto& p : pts) {
    table.add_row({fmt(p.s), fmt(p.ratio), fmt(p.ci_low), fmt(p.ci_high),
                   fmt(p.log_ratio_scaled)});
    jr.push_back({{"s", p.s},
                  {"ratio", p.ratio},
                  {"ci_low", p.ci_low},
                  {"ci_high", p.ci_high},
                  {"log_ratio_scaled", p.log_ratio_scaled}});
    worst = std::max(worst, p.log_ratio_scaled);
  }
  nlohmann::json summary{{"command", "ez-ratio"},
                         {"spec", spec_to_json(spec)},
                         {"points", jr},
                         {"max_log_ratio_scaled", worst}};
  const int rc = emit(c, spec, table, summary);
  if (c.assert_mode && !(worst <= 3.0))
    throw AssertViolation("ez-ratio: max |log ratio| (t-s)^{1/3} exceeds 3");
  return rc;
}

int cmd_density(Common& c, double x, double s, const std::string& barrier_text, int bins) {
  const Barrier barrier = Barrier::parse(barrier_text);
  SpecEcho spec{{"command", "density"},
                {"x", fmt(x)},
                {"s", fmt(s)},
                {"barrier", barrier.to_config()},
                {"bins", fmt(static_cast<std::uint64_t>(bins))}};
  echo_common(spec, c);
  spec.emplace_back("window", barrier.is_constant()
                                  ? "central-bin ratios within 15% of p_s"
                                  : "sufficient-bin ratio band within factor 10");
  if (c.dry_run) return emit(c, spec, {}, {});

  const auto rows = estimators::density_compare(x, s, barrier, bins, c.n, c.seed, c.opt);
  Table table;
  table.columns = {"y_lo", "y_mid", "y_hi", "count", "q_hat", "q_stderr",
                   "reference", "ratio", "sufficient"};
  for (const auto& r : rows)
    table.add_row({fmt(r.y_lo), fmt(r.y_mid), fmt(r.y_hi), fmt(r.count), fmt(r.q_hat),
                   fmt(r.q_stderr), fmt(r.reference), fmt(r.ratio),
                   r.sufficient ? "1" : "0"});

  const double Ls = barrier.level(s);
  double worst_rel = 0.0;
  double band_lo = std::numeric_limits<double>::infinity();
  double band_hi = 0.0;
  std::size_t used = 0;
  for (const auto& r : rows) {
    if (!r.sufficient) continue;
    if (barrier.is_constant()) {
      if (r.y_mid >= 0.25 * Ls && r.y_mid <= 0.75 * Ls) {
        worst_rel = std::max(worst_rel, std::abs(r.ratio - 1.0));
        ++used;
      }
    } else {
      band_lo = std::min(band_lo, r.ratio);
      band_hi = std::max(band_hi, r.ratio);
      ++used;
    }
  }
  nlohmann::json summary{{"command", "density"},
                         {"spec", spec_to_json(spec)},
                         {"bins", rows.size()},
                         {"central_max_rel_dev", worst_rel},
                         {"band_lo", band_lo},
                         {"band_hi", band_hi}};
  const int rc = emit(c, spec, table, summary);
  if (c.assert_mode) {
    if (used == 0) throw AssertViolation("density: no bin has enough mass to test");
    if (barrier.is_constant() && !(worst_rel <= 0.15))
      throw AssertViolation("density: central-bin deviation from p_s exceeds 15%");
    if (!barrier.is_constant() && !(band_hi <= 10.0 * band_lo))
      throw AssertViolation("density: ratio band wider than a factor 10");
  }
  return rc;
}

int cmd_v_martingale(Common& c, double x, double t, double dt, double s_eval) {
  SpecEcho spec{{"command", "v-martingale"},
                {"x", fmt(x)},
                {"t", fmt(t)},
                {"dt", fmt(dt)},
                {"s_eval", fmt(s_eval)}};
  echo_common(spec, c);
  spec.emplace_back("window", "|mean V(s) - V(0)| <= 3 stderr");
  if (c.dry_run) return emit(c, spec, {}, {});

  const auto est = estimators::estimate_v_martingale(x, t, dt, s_eval, c.n, c.seed, c.workers);
  const double z = (est.v_mean.mean - est.v0) / est.v_mean.stderr_;
  Table table;
  table.columns = {"v0", "g0", "s", "mean", "stderr", "ci_low", "ci_high", "z"};
  table.add_row({fmt(est.v0), fmt(est.g0), fmt(est.s_eval), fmt(est.v_mean.mean),
                 fmt(est.v_mean.stderr_), fmt(est.v_mean.ci_low), fmt(est.v_mean.ci_high),
                 fmt(z)});
  nlohmann::json summary{{"command", "v-martingale"},
                         {"spec", spec_to_json(spec)},
                         {"v0", est.v0},
                         {"g0", est.g0},
                         {"v_mean", estimate_json(est.v_mean)},
                         {"z", z}};
  const int rc = emit(c, spec, table, summary);
  if (c.assert_mode && !(std::abs(z) <= 3.0))
    throw AssertViolation("v-martingale: mean V(s) differs from V(0) by more than 3 stderr");
  return rc;
}

int cmd_neveu(Common& c, double y, double zeta, std::uint64_t cap) {
  SpecEcho spec{{"command", "neveu"}, {"y", fmt(y)}, {"zeta", fmt(zeta)}, {"cap", fmt(cap)}};
  echo_common(spec, c);
  spec.emplace_back("window", "|mean K(y) - e^{sqrt2 y}| <= 3 stderr");
  if (c.dry_run) return emit(c, spec, {}, {});

  const auto est = estimators::estimate_neveu(y, zeta, c.n, c.seed, cap, c.workers);
  const double z = (est.k_mean.mean - est.expected_k) / est.k_mean.stderr_;
  Table table;
  table.columns = {"y",       "zeta",        "k_mean", "k_stderr", "expected",
                   "scaled_mean", "scaled_stderr", "z"};
  table.add_row({fmt(y), fmt(zeta), fmt(est.k_mean.mean), fmt(est.k_mean.stderr_),
                 fmt(est.expected_k), fmt(est.scaled_mean.mean), fmt(est.scaled_mean.stderr_),
                 fmt(z)});
  nlohmann::json summary{{"command", "neveu"},
                         {"spec", spec_to_json(spec)},
                         {"k_mean", estimate_json(est.k_mean)},
                         {"scaled_mean", estimate_json(est.scaled_mean)},
                         {"expected_k", est.expected_k},
                         {"z", z}};
  const int rc = emit(c, spec, table, summary);
  if (c.assert_mode) {
    check_truncation(est.k_mean, c.n);
    if (!(std::abs(z) <= 3.0))
      throw AssertViolation("neveu: mean K(y) differs from e^{sqrt2 y} by more than 3 stderr");
  }
  return rc;
}

int cmd_gw(Common& c, const std::string& law_text, double tol) {
  estimators::OffspringLaw law;
  if (law_text.rfind("poisson:", 0) == 0) {
    law = estimators::poisson_law(std::stod(law_text.substr(8)));
  } else if (law_text.rfind("list:", 0) == 0) {
    std::stringstream ss(law_text.substr(5));
    std::string item;
    while (std::getline(ss, item, ',')) law.p.push_back(std::stod(item));
  } else {
    throw std::domain_error("gw: law must be poisson:<lambda> or list:<p0,p1,...>");
  }

  SpecEcho spec{{"command", "gw"}, {"law", law_text}, {"tol", fmt(tol)}};
  if (c.dry_run) return emit(c, spec, {}, {});

  const double q = estimators::gw_extinction(law, tol);
  const double mean = law.mean();
  const double fm = law.factorial_moment();
  const double bound =
      mean > 1.0 && fm > 0.0 ? estimators::gw_survival_lower_bound(mean, fm) : 0.0;

  Table table;
  table.columns = {"q", "survival", "mean", "factorial_moment", "bound"};
  table.add_row({fmt(q), fmt(1.0 - q), fmt(mean), fmt(fm), fmt(bound)});
  nlohmann::json summary{{"command", "gw"},   {"spec", spec_to_json(spec)},
                         {"q", q},            {"survival", 1.0 - q},
                         {"mean", mean},      {"factorial_moment", fm},
                         {"bound", bound}};
  const int rc = emit(c, spec, table, summary);
  if (c.assert_mode && mean > 1.0 && fm > 0.0 && !(bound <= 1.0 - q + 1e-12))
    throw AssertViolation("gw: lower bound exceeds exact survival probability");
  return rc;
}

int cmd_boundary_start(Common& c, double t) {
  const double x = analytic::constants().c * std::cbrt(t);
  SpecEcho spec{{"command", "boundary-start"}, {"t", fmt(t)}, {"x", fmt(x)}};
  echo_common(spec, c);
  spec.emplace_back("window", "p >= 0.05 and ci_low > 0.01");
  if (c.dry_run) return emit(c, spec, {}, {});

  const auto est = estimators::estimate_survival(x, t, false, c.n, c.seed, c.opt);
  Table table;
  table.columns = {"t", "x", "mean", "stderr", "ci_low", "ci_high", "n_used", "truncated"};
  table.add_row({fmt(t), fmt(x), fmt(est.mean), fmt(est.stderr_), fmt(est.ci_low),
                 fmt(est.ci_high), fmt(est.n_replicates), fmt(est.truncated_count)});
  nlohmann::json summary{{"command", "boundary-start"},
                         {"spec", spec_to_json(spec)},
                         {"estimate", estimate_json(est)}};
  const int rc = emit(c, spec, table, summary);
  if (c.assert_mode) {
    check_truncation(est, c.n);
    if (!(est.mean >= 0.05 && est.ci_low > 0.01))
      throw AssertViolation("boundary-start: survival estimate below the declared window");
  }
  return rc;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Monte Carlo engine and closed forms for branching Brownian motion"
               " with critical drift and absorption"};
  app.set_config("--config", "", "config file with key = value lines");
  app.require_subcommand(1);

  // One option block per subcommand; CLI11 only writes parsed values, so the
  // blocks must not share storage.
  Common c_bridge, c_surv, c_ext, c_hits, c_ez, c_dens, c_vm, c_nev, c_gw, c_bs;

  auto* bridge = app.add_subcommand("bridge-test", "closed-form bridge crossing vs path oracle");
  double bx = 0.0, by = 0.0, bt = 1.0, ba = 1.0, bb = 0.0;
  std::uint64_t bsteps = 10000;
  bridge->add_option("--x", bx, "bridge start")->capture_default_str();
  bridge->add_option("--y", by, "bridge end")->capture_default_str();
  bridge->add_option("--t", bt, "bridge duration")->capture_default_str();
  bridge->add_option("--a", ba, "line level at 0")->capture_default_str();
  bridge->add_option("--b", bb, "line slope")->capture_default_str();
  bridge->add_option("--steps", bsteps, "oracle grid steps")->capture_default_str();
  add_common(bridge, c_bridge, 100000);

  auto* survival = app.add_subcommand("survival", "survival probability to a horizon");
  double sx = 1.0, st = 8.0;
  bool sbarrier = false;
  survival->add_option("--x", sx, "initial position")->capture_default_str();
  survival->add_option("--t", st, "horizon")->capture_default_str();
  survival->add_flag("--barrier", sbarrier, "also kill at the moving boundary");
  add_common(survival, c_surv, 100000);

  auto* extinction = app.add_subcommand("extinction", "extinction-time quantiles");
  double ex = 7.0;
  std::vector<double> equant{0.25, 0.5, 0.75};
  extinction->add_option("--x", ex, "initial position")->capture_default_str();
  extinction->add_option("--quantiles", equant, "quantiles to report")->delimiter(',');
  add_common(extinction, c_ext, 1000);

  auto* hits = app.add_subcommand("hits", "boundary-hit counts R_{s,u}");
  double hx = 3.0, ht = 8.0, hs = 0.0, hu = 4.0;
  hits->add_option("--x", hx, "initial position")->capture_default_str();
  hits->add_option("--t", ht, "barrier horizon")->capture_default_str();
  hits->add_option("--s", hs, "window start")->capture_default_str();
  hits->add_option("--u", hu, "window end")->capture_default_str();
  add_common(hits, c_hits, 10000);

  auto* ez = app.add_subcommand("ez-ratio", "E[Z(s)] against Z(0)/B(s)");
  double zx = 2.0, zt = 20.0;
  std::vector<double> zs{5.0, 10.0, 15.0};
  ez->add_option("--x", zx, "initial position")->capture_default_str();
  ez->add_option("--t", zt, "barrier horizon")->capture_default_str();
  ez->add_option("--s", zs, "checkpoint times")->delimiter(',');
  add_common(ez, c_ez, 100000);

  auto* density = app.add_subcommand("density", "particle density vs closed form");
  double dx = 2.0, ds = 8.0;
  std::string dbarrier = "constant:4";
  int dbins = 40;
  density->add_option("--x", dx, "initial position")->capture_default_str();
  density->add_option("--s", ds, "observation time")->capture_default_str();
  density->add_option("--barrier", dbarrier, "barrier spec")->capture_default_str();
  density->add_option("--bins", dbins, "histogram bins")->capture_default_str();
  add_common(density, c_dens, 1000000);

  auto* vmart = app.add_subcommand("v-martingale", "mean of V(s) against V(0)");
  double vx = 0.0, vt = 10.0, vdt = 1e-3, vs = 5.0;
  vmart->add_option("--x", vx, "start (default L(0)/2)");
  vmart->add_option("--t", vt, "strip horizon")->capture_default_str();
  vmart->add_option("--dt", vdt, "path step")->capture_default_str();
  vmart->add_option("--s-eval", vs, "evaluation time")->capture_default_str();
  add_common(vmart, c_vm, 100000);

  auto* neveu = app.add_subcommand("neveu", "hit counts K(y) at -y");
  double ny = 1.0, nzeta = std::numeric_limits<double>::infinity();
  std::uint64_t ncap = 10'000'000;
  neveu->add_option("--y", ny, "depth")->capture_default_str();
  neveu->add_option("--zeta", nzeta, "time cutoff for K_zeta");
  neveu->add_option("--cap", ncap, "cumulative particle cap")->capture_default_str();
  add_common(neveu, c_nev, 100000);

  auto* gw = app.add_subcommand("gw", "Galton-Watson extinction probability and bound");
  std::string glaw = "poisson:1.2";
  double gtol = 1e-9;
  gw->add_option("--law", glaw, "poisson:<lambda> or list:<p0,p1,...>")->capture_default_str();
  gw->add_option("--tol", gtol, "fixed-point tolerance")->capture_default_str();
  gw->add_flag("--assert", c_gw.assert_mode, "turn declared windows into exit-code checks");
  gw->add_flag("--dry-run", c_gw.dry_run, "print the resolved spec and exit");
  gw->add_option("--out", c_gw.out, "output file path");
  gw->add_option("--format", c_gw.format, "output format")
      ->check(CLI::IsMember({"csv", "jsonl"}));

  auto* bstart = app.add_subcommand("boundary-start", "survival from x = c t^{1/3}");
  double bst = 8.0;
  bstart->add_option("--t", bst, "horizon")->capture_default_str();
  add_common(bstart, c_bs, 10000);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << nlohmann::json{{"error", {{"code", 2}, {"message", e.what()}}}}.dump()
              << std::endl;
    return 2;
  }

  try {
    if (app.got_subcommand(bridge)) {
      finalize_seed(bridge, c_bridge);
      return cmd_bridge_test(c_bridge, bx, by, bt, ba, bb, bsteps);
    }
    if (app.got_subcommand(survival)) {
      finalize_seed(survival, c_surv);
      return cmd_survival(c_surv, sx, st, sbarrier);
    }
    if (app.got_subcommand(extinction)) {
      finalize_seed(extinction, c_ext);
      return cmd_extinction(c_ext, ex, equant);
    }
    if (app.got_subcommand(hits)) {
      finalize_seed(hits, c_hits);
      return cmd_hits(c_hits, hx, ht, hs, hu);
    }
    if (app.got_subcommand(ez)) {
      finalize_seed(ez, c_ez);
      return cmd_ez_ratio(c_ez, zx, zt, zs);
    }
    if (app.got_subcommand(density)) {
      finalize_seed(density, c_dens);
      return cmd_density(c_dens, dx, ds, dbarrier, dbins);
    }
    if (app.got_subcommand(vmart)) {
      finalize_seed(vmart, c_vm);
      if (vmart->count("--x") == 0)
        vx = 0.5 * analytic::constants().c * std::cbrt(vt);
      return cmd_v_martingale(c_vm, vx, vt, vdt, vs);
    }
    if (app.got_subcommand(neveu)) {
      finalize_seed(neveu, c_nev);
      return cmd_neveu(c_nev, ny, nzeta, ncap);
    }
    if (app.got_subcommand(gw)) {
      return cmd_gw(c_gw, glaw, gtol);
    }
    if (app.got_subcommand(bstart)) {
      finalize_seed(bstart, c_bs);
      return cmd_boundary_start(c_bs, bst);
    }
    throw std::runtime_error("no subcommand selected");
  } catch (const AssertViolation& e) {
    std::cerr << nlohmann::json{{"error", {{"code", 4}, {"message", e.what()}}}}.dump()
              << std::endl;
    return 4;
  } catch (const std::domain_error& e) {
    std::cerr << nlohmann::json{{"error", {{"code", 2}, {"message", e.what()}}}}.dump()
              << std::endl;
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << nlohmann::json{{"error", {{"code", 2}, {"message", e.what()}}}}.dump()
              << std::endl;
    return 2;
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json{{"error", {{"code", 3}, {"message", e.what()}}}}.dump()
              << std::endl;
    return 3;
  }
}

}  // namespace bbmabs::cli
