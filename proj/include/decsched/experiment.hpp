#pragma once

// Parameter sweeps over generated instances, producing one CSV row per
// (sweep value, seed, policy).
//
// Policy meaning depends on the sweep kind, mirroring what each study holds
// fixed:
//   ALLOC_VS_W   orders fixed to index order; OCA = three-phase allocation,
//                ECA = w/n per node.
//   ORDER_VS_W   three-phase allocation; OCO = optimized orders, ACO = index order.
//   DELAY_VS_N   first N generated nodes; OCA = (three-phase, index order),
//                OCO = (w/n, optimized orders), ECA/ACO = (w/n, index order).
//   any kind     OCA-OCO = (three-phase, optimized orders); LINEAR, GREEDY and
//                EXHAUSTIVE run node selection and report the selected delay.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <nlohmann/json.hpp>
#include <ostream>
#include <string>
#include <string_view>
#include <thread>
#include <tuple>
#include <vector>

#include "decsched/allocation.hpp"
#include "decsched/error.hpp"
#include "decsched/guard.hpp"
#include "decsched/model.hpp"
#include "decsched/numeric.hpp"
#include "decsched/ordering.hpp"
#include "decsched/selection.hpp"

namespace decsched {

enum class ExperimentKind { kAllocVsW, kOrderVsW, kDelayVsN };

inline std::string_view to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::kAllocVsW: return "ALLOC_VS_W";
    case ExperimentKind::kOrderVsW: return "ORDER_VS_W";
    case ExperimentKind::kDelayVsN: return "DELAY_VS_N";
  }
  return "?";
}

inline ExperimentKind parse_experiment_kind(std::string_view s) {
  if (s == "ALLOC_VS_W") return ExperimentKind::kAllocVsW;
  if (s == "ORDER_VS_W") return ExperimentKind::kOrderVsW;
  if (s == "DELAY_VS_N") return ExperimentKind::kDelayVsN;
  throw InputError("unknown experiment kind '" + std::string(s) + "'");
}

inline const std::vector<std::string>& registered_policies() {
  static const std::vector<std::string> kPolicies{"OCA", "ECA", "OCO", "ACO", "OCA-OCO", "LINEAR", "GREEDY",
                                                  "EXHAUSTIVE"};
  return kPolicies;
}

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::kAllocVsW;
  Profile profile = Profile::kUMUC;
  std::vector<double> sweep;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> policies;
  std::size_t n = 3;                    // node count for *_VS_W
  double workload = kDefaultWorkload;   // workload for DELAY_VS_N
  std::string order = "auto";           // order policy behind "OCO"

  static std::vector<std::uint64_t> default_seeds() {
    std::vector<std::uint64_t> s(20);
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = i + 1;
    return s;
  }

  static std::vector<std::string> default_policies(ExperimentKind k) {
    switch (k) {
      case ExperimentKind::kAllocVsW: return {"OCA", "ECA"};
      case ExperimentKind::kOrderVsW: return {"OCO", "ACO"};
      case ExperimentKind::kDelayVsN: return {"OCA", "OCO", "OCA-OCO"};
    }
    return {};
  }

  void validate() const {
    if (sweep.empty()) throw InputError("experiment sweep must not be empty");
    for (double v : sweep) {
      if (!std::isfinite(v) || v < 0.0) throw InputError("sweep values must be finite and >= 0");
      if (kind == ExperimentKind::kDelayVsN && (v < 1.0 || v != std::floor(v))) {
        throw InputError("DELAY_VS_N sweep values must be integers >= 1");
      }
    }
    if (seeds.empty()) throw InputError("experiment needs at least one seed");
    if (policies.empty()) throw InputError("experiment needs at least one policy");
    for (const std::string& p : policies) {
      const auto& reg = registered_policies();
      if (std::find(reg.begin(), reg.end(), p) == reg.end()) throw InputError("unknown policy '" + p + "'");
    }
    if (n == 0) throw InputError("experiment node count must be >= 1");
    if (!std::isfinite(workload) || workload < 0.0) throw InputError("experiment workload must be >= 0");
    OrderPolicy::parse(order);
  }
};

inline ExperimentSpec experiment_from_json(const nlohmann::json& j) {
  ExperimentSpec s;
  try {
    s.kind = parse_experiment_kind(j.at("kind").get<std::string>());
    s.profile = parse_profile(j.value("profile", std::string("UMUC")));
    s.sweep = j.at("sweep").get<std::vector<double>>();
    s.seeds = j.contains("seeds") ? j["seeds"].get<std::vector<std::uint64_t>>() : ExperimentSpec::default_seeds();
    s.policies = j.contains("policies") ? j["policies"].get<std::vector<std::string>>()
                                        : ExperimentSpec::default_policies(s.kind);
    s.n = j.value("n", std::size_t{3});
    s.workload = j.value("workload", kDefaultWorkload);
    s.order = j.value("order", std::string("auto"));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("experiment spec: ") + e.what());
  }
  s.validate();
  return s;
}

struct ExperimentRow {
  ExperimentKind kind;
  Profile profile;
  std::uint64_t seed;
  double sweep_value;
  std::string policy;
  double delay;
};

// The instance a grid point runs on.
inline Instance experiment_instance(const ExperimentSpec& spec, double sweep_value, std::uint64_t seed) {
  if (spec.kind == ExperimentKind::kDelayVsN) {
    const auto max_n = static_cast<std::size_t>(*std::max_element(spec.sweep.begin(), spec.sweep.end()));
    return generate_instance(max_n, seed, spec.profile, spec.workload).prefix(static_cast<std::size_t>(sweep_value));
  }
  return generate_instance(spec.n, seed, spec.profile, sweep_value);
}

inline double policy_delay(const ExperimentSpec& spec, const Instance& inst, std::string_view policy,
                           const Guard& guard = {}) {
  const std::vector<NodeId> all = inst.all_ids();
  const OrderPolicy optimized = OrderPolicy::parse(spec.order);
  const CommPlan index_order = CommPlan::identity(all);
  auto equal_split = [&](const CommPlan& plan) {
    return delay_of_fixed_allocation(inst, plan, equal_allocation(inst, plan));
  };
  auto optimized_plan = [&] { return plan_with_policy(inst, all, optimized, guard); };
  const bool delay_vs_n = spec.kind == ExperimentKind::kDelayVsN;

  if (policy == "OCA") return min_delay(inst, index_order);
  if (policy == "ECA") return equal_split(index_order);
  if (policy == "OCO") return delay_vs_n ? equal_split(optimized_plan()) : min_delay(inst, optimized_plan());
  if (policy == "ACO") return delay_vs_n ? equal_split(index_order) : min_delay(inst, index_order);
  if (policy == "OCA-OCO") return min_delay(inst, optimized_plan());
  if (policy == "LINEAR") {
    const auto uniform_delays = std::all_of(all.begin(), all.end(), [&](NodeId id) {
      return inst.node(id).fwd_delay == inst.node(0).fwd_delay && inst.node(id).bwd_delay == inst.node(0).bwd_delay;
    });
    return select_linear(inst, uniform_delays ? RankBy::kRate : RankBy::kCommDelay).delay;
  }
  if (policy == "GREEDY") return select_greedy(inst, optimized, guard).delay;
  if (policy == "EXHAUSTIVE") return select_exhaustive(inst, optimized, guard).delay;
  throw InputError("unknown policy '" + std::string(policy) + "'");
}

// Rows come back sorted by (sweep value, seed, policy), independent of how the
// grid was split across threads.
inline std::vector<ExperimentRow> run_experiment(const ExperimentSpec& spec, const Guard& guard = {},
                                                 unsigned threads = 0) {
  spec.validate();
  std::vector<std::pair<double, std::uint64_t>> grid;
  for (double v : spec.sweep) {
    for (std::uint64_t s : spec.seeds) grid.emplace_back(v, s);
  }
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(grid.size()));

  auto work = [&](std::size_t begin, std::size_t step) {
    std::vector<ExperimentRow> rows;
    for (std::size_t g = begin; g < grid.size(); g += step) {
      const auto [value, seed] = grid[g];
      const Instance inst = experiment_instance(spec, value, seed);
      for (const std::string& p : spec.policies) {
        rows.push_back({spec.kind, spec.profile, seed, value, p, policy_delay(spec, inst, p, guard)});
      }
    }
    return rows;
  };

  std::vector<ExperimentRow> rows;
  if (threads <= 1) {
    rows = work(0, 1);
  } else {
    std::vector<std::future<std::vector<ExperimentRow>>> jobs;
    for (unsigned t = 0; t < threads; ++t) jobs.push_back(std::async(std::launch::async, work, t, threads));
    for (auto& j : jobs) {
      auto part = j.get();
      rows.insert(rows.end(), part.begin(), part.end());
    }
  }
  std::sort(rows.begin(), rows.end(), [](const ExperimentRow& a, const ExperimentRow& b) {
    return std::tie(a.sweep_value, a.seed, a.policy) < std::tie(b.sweep_value, b.seed, b.policy);
  });
  return rows;
}

inline constexpr std::string_view kCsvHeader = "kind,profile,seed,sweep_value,policy,delay";

inline void write_csv(std::ostream& os, const std::vector<ExperimentRow>& rows) {
  os << kCsvHeader << "\n";
  for (const ExperimentRow& r : rows) {
    os << to_string(r.kind) << ',' << to_string(r.profile) << ',' << r.seed << ',' << format_double(r.sweep_value)
       << ',' << r.policy << ',' << format_double(r.delay) << '\n';
  }
}

// Row-group invariants the harness enforces on its own output: OCA <= ECA,
// OCO <= ACO where both share the allocation, OCA-OCO below the single-sided
// policies, and zero gap (delay = S + B) while every compared policy's
// allocation fits the gaps: in the allocation sweep when w/n fits each node's
// gap, in the order sweep when w fits every compared order's base capacity.
inline std::vector<std::string> check_experiment(const ExperimentSpec& spec, const std::vector<ExperimentRow>& rows) {
  std::vector<std::string> problems;
  auto find = [&](double v, std::uint64_t seed, std::string_view p) -> const ExperimentRow* {
    for (const ExperimentRow& r : rows) {
      if (r.sweep_value == v && r.seed == seed && r.policy == p) return &r;
    }
    return nullptr;
  };
  auto expect_le = [&](const ExperimentRow* a, const ExperimentRow* b) {
    if (a && b && !approx_le(a->delay, b->delay)) {
      problems.push_back(a->policy + " > " + b->policy + " at sweep " + format_double(a->sweep_value) + " seed " +
                         std::to_string(a->seed));
    }
  };
  for (double v : spec.sweep) {
    for (std::uint64_t seed : spec.seeds) {
      expect_le(find(v, seed, "OCA"), find(v, seed, "ECA"));
      if (spec.kind == ExperimentKind::kOrderVsW) expect_le(find(v, seed, "OCO"), find(v, seed, "ACO"));
      expect_le(find(v, seed, "OCA-OCO"), find(v, seed, "OCA"));
      expect_le(find(v, seed, "OCA-OCO"), find(v, seed, "OCO"));
      if (spec.kind == ExperimentKind::kAllocVsW) {
        const Instance inst = experiment_instance(spec, v, seed);
        const CommPlan aco = CommPlan::identity(inst.all_ids());
        const GapProfile g = gap_profile(inst, aco);
        const double share = inst.workload() / static_cast<double>(inst.size());
        bool fits = true;
        for (std::size_t i = 0; i < inst.size(); ++i) {
          fits = fits && share <= inst.node(i).rate * (g.pre_gap[i] + g.post_gap[i]);
        }
        if (fits) {
          for (const char* p : {"OCA", "ECA"}) {
            const ExperimentRow* r = find(v, seed, p);
            if (r && !approx_eq(r->delay, g.total_fwd + g.total_bwd)) {
              problems.push_back(std::string(p) + " exceeds S+B in the zero-gap regime at sweep " + format_double(v));
            }
          }
        }
      }
      if (spec.kind == ExperimentKind::kOrderVsW) {
        const Instance inst = experiment_instance(spec, v, seed);
        const std::vector<NodeId> all = inst.all_ids();
        const CommPlan aco = CommPlan::identity(all);
        const CommPlan oco = plan_with_policy(inst, all, OrderPolicy::parse(spec.order));
        const double cap = std::min(gap_profile(inst, aco).base_capacity(inst, aco),
                                    gap_profile(inst, oco).base_capacity(inst, oco));
        if (inst.workload() <= cap) {
          const GapProfile g = gap_profile(inst, aco);
          for (const char* p : {"OCO", "ACO"}) {
            const ExperimentRow* r = find(v, seed, p);
            if (r && !approx_eq(r->delay, g.total_fwd + g.total_bwd)) {
              problems.push_back(std::string(p) + " exceeds S+B in the zero-gap regime at sweep " + format_double(v));
            }
          }
        }
      }
    }
  }
  return problems;
}

}  // namespace decsched
