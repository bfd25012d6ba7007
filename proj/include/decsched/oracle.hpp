#pragma once

// Brute-force verification report for one instance: approximation ratio of
// the greedy prefix, allocation optimality by random sampling, canonical
// schedule dominance over adversarial schedules, and the closed-form orders
// on uniform instances.

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "decsched/allocation.hpp"
#include "decsched/guard.hpp"
#include "decsched/model.hpp"
#include "decsched/numeric.hpp"
#include "decsched/ordering.hpp"
#include "decsched/timeline.hpp"

namespace decsched {

// Random feasible split of w over n nodes: normalized exponentials, with some
// nodes zeroed so corner allocations are sampled too.
inline std::vector<double> random_allocation(std::size_t n, double w, std::mt19937_64& rng) {
  std::vector<double> x(n, 0.0);
  const bool sparse = unit_draw(rng) < 0.3;
  double sum = 0.0;
  for (double& v : x) {
    if (sparse && unit_draw(rng) < 0.5) continue;
    v = -std::log(1.0 - unit_draw(rng));
    sum += v;
  }
  if (sum == 0.0) {
    x[detail::uniform_index(rng, n)] = 1.0;
    sum = 1.0;
  }
  double used = 0.0;
  std::size_t last = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (x[i] > 0.0) last = i;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (i == last) continue;
    x[i] = w * x[i] / sum;
    used += x[i];
  }
  x[last] = std::max(0.0, w - used);
  return x;
}

inline CommPlan random_plan(std::span<const NodeId> selected, std::mt19937_64& rng) {
  std::vector<NodeId> f(selected.begin(), selected.end()), b = f;
  std::shuffle(f.begin(), f.end(), rng);
  std::shuffle(b.begin(), b.end(), rng);
  return CommPlan(std::vector<NodeId>(selected.begin(), selected.end()), f, b);
}

inline SampleFeatures random_features(std::size_t n, std::mt19937_64& rng) {
  SampleFeatures f;
  do {
    f.preempt = unit_draw(rng) < 0.5;
    f.idle = unit_draw(rng) < 0.5;
    f.interleave = n >= 2 && unit_draw(rng) < 0.5;
  } while (!f.any());
  return f;
}

struct OracleCheck {
  std::string name;
  bool pass = true;
  bool info = false;  // measurement only, never fails
  double margin = 0.0;
  std::string detail;
};

struct OracleOptions {
  std::uint64_t seed = 1;
  std::size_t allocation_samples = 1000;
  std::size_t timeline_samples = 200;
  Guard guard;
};

struct OracleReport {
  std::vector<OracleCheck> checks;
  bool all_pass() const {
    for (const OracleCheck& c : checks) {
      if (!c.pass) return false;
    }
    return true;
  }
};

inline OracleReport run_oracle(const Instance& inst, const OracleOptions& opt = {}) {
  opt.guard.check_order(inst.size());
  OracleReport rep;
  const std::vector<NodeId> all = inst.all_ids();
  const std::size_t n = all.size();
  std::mt19937_64 rng(opt.seed);

  double v_star[2] = {0.0, 0.0};
  std::vector<NodeId> best_order[2];
  for (Direction dir : {Direction::kForward, Direction::kBackward}) {
    const int d = dir == Direction::kForward ? 0 : 1;
    const ExhaustiveOrder ex = order_exhaustive(inst, all, dir, opt.guard);
    v_star[d] = ex.v_star;
    best_order[d] = ex.order;
    const std::string tag = "[" + std::string(to_string(dir)) + "]";

    double prev_prefix = -std::numeric_limits<double>::infinity();
    bool monotone = true;
    for (std::size_t k = 1; k <= n; ++k) {
      const RatioCheck rc = verify_ratio(inst, all, dir, k, opt.guard);
      const double bound = static_cast<double>(k) / static_cast<double>(n) * rc.v_star;
      rep.checks.push_back({"greedy_ratio" + tag + " k=" + std::to_string(k), rc.bound_holds, false,
                            rc.prefix_v - bound,
                            "prefix_v=" + format_double(rc.prefix_v) + " (k/n)v*=" + format_double(bound)});
      if (!approx_ge(rc.prefix_v, prev_prefix)) monotone = false;
      prev_prefix = rc.prefix_v;
    }
    rep.checks.push_back({"greedy_prefix_monotone_in_k" + tag, monotone, false, 0.0, ""});

    const bool uniform_rates = detail::uniform_by(inst, all, [](const NodeSpec& x) { return x.rate; });
    const bool uniform_delays = detail::uniform_by(inst, all, [dir](const NodeSpec& x) { return x.delay(dir); });
    const double v_ldf = objective_v(inst, all, order_descending_delay(inst, all, dir), dir).v;
    const double v_fcl = objective_v(inst, all, order_by_rate(inst, all, dir), dir).v;
    if (uniform_rates) {
      rep.checks.push_back({"descending_delay_optimal" + tag, approx_eq(v_ldf, v_star[d]), false, v_ldf - v_star[d],
                            "v=" + format_double(v_ldf) + " v*=" + format_double(v_star[d])});
    }
    if (uniform_delays) {
      rep.checks.push_back({"by_rate_optimal" + tag, approx_eq(v_fcl, v_star[d]), false, v_fcl - v_star[d],
                            "v=" + format_double(v_fcl) + " v*=" + format_double(v_star[d])});
    }
    const double denom = v_star[d] > 0.0 ? v_star[d] : 1.0;
    rep.checks.push_back({"ldf_ratio" + tag, true, true, v_star[d] > 0.0 ? v_ldf / denom : 1.0, "v_ldf/v*"});
    rep.checks.push_back({"fcl_ratio" + tag, true, true, v_star[d] > 0.0 ? v_fcl / denom : 1.0, "v_fcl/v*"});
  }

  const CommPlan best(all, best_order[0], best_order[1]);
  {
    const GapProfile g = gap_profile(inst, best);
    const double expect =
        g.total_fwd + g.total_bwd + std::max(0.0, (inst.workload() - v_star[0] - v_star[1]) / g.total_rate);
    const double got = min_delay(inst, best);
    rep.checks.push_back({"order_decomposition", approx_eq(got, expect), false, got - expect,
                          "min_delay=" + format_double(got) + " closed=" + format_double(expect)});
  }

  // allocation optimality on the index-order plan and the optimized plan
  for (const CommPlan& plan : {CommPlan::identity(all), best}) {
    const double opt_delay = min_delay(inst, plan);
    const Allocation a = allocate(inst, plan);
    const double own = delay_of_fixed_allocation(inst, plan, a.totals());
    const std::string tag = plan == best ? "[optimized]" : "[index]";
    rep.checks.push_back({"allocation_consistent" + tag, approx_eq(own, opt_delay), false, own - opt_delay, ""});
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < opt.allocation_samples; ++s) {
      const std::vector<double> x = random_allocation(n, inst.workload(), rng);
      worst = std::min(worst, delay_of_fixed_allocation(inst, plan, x) - opt_delay);
    }
    if (opt.allocation_samples == 0) worst = 0.0;
    rep.checks.push_back({"allocation_dominance" + tag, worst >= -tolerance(opt_delay, opt_delay), false, worst,
                          std::to_string(opt.allocation_samples) + " samples"});
  }

  // canonical schedule vs adversarial schedules
  {
    const Allocation a = allocate(inst, best);
    const Timeline canon = build_canonical(inst, best, a);
    const bool canon_ok = validate(canon, inst, best, a).empty() && approx_eq(canon.horizon, min_delay(inst, best));
    rep.checks.push_back({"canonical_timeline_valid", canon_ok, false, canon.horizon - min_delay(inst, best), ""});

    double worst = std::numeric_limits<double>::infinity();
    std::size_t invalid = 0;
    for (std::size_t s = 0; s < opt.timeline_samples; ++s) {
      const CommPlan plan = random_plan(all, rng);
      const std::vector<double> x = random_allocation(n, inst.workload(), rng);
      const Timeline t = sample_adversarial(inst, plan, x, rng(), random_features(n, rng));
      if (!validate(t, inst, all, x).empty()) ++invalid;
      worst = std::min(worst, t.horizon - min_delay(inst, plan));
    }
    if (opt.timeline_samples == 0) worst = 0.0;
    rep.checks.push_back({"adversarial_timelines_valid", invalid == 0, false, static_cast<double>(invalid),
                          std::to_string(invalid) + " invalid of " + std::to_string(opt.timeline_samples)});
    rep.checks.push_back({"adversarial_dominance", worst >= -kRelTol * std::max(1.0, min_delay(inst, best)), false,
                          worst, "min(horizon - min_delay)"});
  }
  return rep;
}

}  // namespace decsched
