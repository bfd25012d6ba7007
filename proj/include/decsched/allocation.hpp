#pragma once

// Workload allocation for a fixed communication plan.
//
// In the canonical schedule all forward transmissions run back to back from
// time 0 and end at t1 = S; all backward transmissions run back to back and
// start at t2 = D - B. A node may compute from the end of its own forward
// transmission until the start of its own backward transmission, so its
// window is pre_gap + (t2 - t1) + post_gap.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "decsched/error.hpp"
#include "decsched/model.hpp"
#include "decsched/numeric.hpp"

namespace decsched {

// Per-node quantities are indexed like plan.selected().
struct GapProfile {
  std::vector<double> pre_gap;   // own forward end -> t1
  std::vector<double> post_gap;  // t2 -> own backward start
  std::vector<double> fwd_end;   // own forward end, measured from 0
  double total_fwd = 0.0;        // S
  double total_bwd = 0.0;        // B
  double total_rate = 0.0;       // R

  // Workload completable without stretching past S + B.
  double base_capacity(const Instance& inst, const CommPlan& plan) const {
    double cap = 0.0;
    for (std::size_t i = 0; i < plan.size(); ++i) {
      cap += inst.node(plan.selected()[i]).rate * (pre_gap[i] + post_gap[i]);
    }
    return cap;
  }
};

inline GapProfile gap_profile(const Instance& inst, const CommPlan& plan) {
  plan.check_against(inst);
  const std::size_t n = plan.size();
  GapProfile g;
  g.pre_gap.assign(n, 0.0);
  g.post_gap.assign(n, 0.0);
  g.fwd_end.assign(n, 0.0);

  std::vector<double> fwd_end_by_pos(n), bwd_before_by_pos(n);
  double acc = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    acc += inst.node(plan.fwd_order()[p]).fwd_delay;
    fwd_end_by_pos[p] = acc;
  }
  g.total_fwd = acc;
  acc = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    bwd_before_by_pos[p] = acc;
    acc += inst.node(plan.bwd_order()[p]).bwd_delay;
  }
  g.total_bwd = acc;

  for (std::size_t i = 0; i < n; ++i) {
    const NodeId id = plan.selected()[i];
    const std::size_t pf = plan.fwd_position(id);
    g.fwd_end[i] = fwd_end_by_pos[pf];
    // Summed directly over later slots rather than S - fwd_end to keep exact zeros.
    double pre = 0.0;
    for (std::size_t q = pf + 1; q < n; ++q) pre += inst.node(plan.fwd_order()[q]).fwd_delay;
    g.pre_gap[i] = pre;
    g.post_gap[i] = bwd_before_by_pos[plan.bwd_position(id)];
    g.total_rate += inst.node(id).rate;
  }
  return g;
}

// Minimum algorithm delay achievable with `plan`:
//   D = S + B + max(0, (w - cap0) / R).
inline double min_delay(const Instance& inst, const CommPlan& plan) {
  const GapProfile g = gap_profile(inst, plan);
  const double cap0 = g.base_capacity(inst, plan);
  const double stretch = std::max(0.0, (inst.workload() - cap0) / g.total_rate);
  return g.total_fwd + g.total_bwd + stretch;
}

struct NodeShare {
  NodeId id = 0;
  double phase1 = 0.0;  // finished before t1
  double phase2 = 0.0;  // finished after t2
  double phase3 = 0.0;  // stretch between t1 and t2, proportional to rate
  double total = 0.0;
};

struct Allocation {
  std::vector<NodeShare> per_node;  // indexed like plan.selected()

  std::vector<double> totals() const {
    std::vector<double> t;
    t.reserve(per_node.size());
    for (const NodeShare& s : per_node) t.push_back(s.total);
    return t;
  }
  double sum() const {
    double s = 0.0;
    for (const NodeShare& n : per_node) s += n.total;
    return s;
  }
};

// Three-phase optimal allocation. Phase 1 fills pre-gaps in ascending forward
// slot order, phase 2 fills post-gaps in descending backward slot order, and
// any remainder is split in proportion to rates.
inline Allocation allocate(const Instance& inst, const CommPlan& plan) {
  const GapProfile g = gap_profile(inst, plan);
  const std::size_t n = plan.size();
  Allocation a;
  a.per_node.resize(n);
  for (std::size_t i = 0; i < n; ++i) a.per_node[i].id = plan.selected()[i];

  auto index_of = [&](NodeId id) {
    return static_cast<std::size_t>(std::lower_bound(plan.selected().begin(), plan.selected().end(), id) -
                                    plan.selected().begin());
  };

  double remaining = inst.workload();
  for (std::size_t p = 0; p + 1 < n && remaining > 0.0; ++p) {
    const std::size_t i = index_of(plan.fwd_order()[p]);
    const double take = std::min(inst.node(a.per_node[i].id).rate * g.pre_gap[i], remaining);
    a.per_node[i].phase1 = take;
    remaining -= take;
  }
  for (std::size_t p = n; p-- > 1 && remaining > 0.0;) {
    const std::size_t i = index_of(plan.bwd_order()[p]);
    const double take = std::min(inst.node(a.per_node[i].id).rate * g.post_gap[i], remaining);
    a.per_node[i].phase2 = take;
    remaining -= take;
  }
  // Dust from the subtractions above is not real work.
  if (remaining <= tolerance(remaining, inst.workload())) remaining = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    NodeShare& s = a.per_node[i];
    s.phase3 = remaining * inst.node(s.id).rate / g.total_rate;
    s.total = s.phase1 + s.phase2 + s.phase3;
  }
  return a;
}

inline void check_fixed_allocation(const Instance& inst, const CommPlan& plan, std::span<const double> work) {
  if (work.size() != plan.size()) {
    throw InputError("allocation has " + std::to_string(work.size()) + " entries, plan selects " +
                     std::to_string(plan.size()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < work.size(); ++i) {
    if (!std::isfinite(work[i]) || work[i] < 0.0) {
      throw InputError("allocation for node " + std::to_string(plan.selected()[i]) + " is negative");
    }
    sum += work[i];
  }
  if (!approx_eq(sum, inst.workload())) {
    throw InputError("allocation sums to " + format_double(sum) + ", workload is " +
                     format_double(inst.workload()));
  }
}

// Minimum delay over canonical schedules when each selected node must process
// exactly `work[i]` (indexed like plan.selected()).
inline double delay_of_fixed_allocation(const Instance& inst, const CommPlan& plan, std::span<const double> work) {
  check_fixed_allocation(inst, plan, work);
  const GapProfile g = gap_profile(inst, plan);
  double t2 = g.total_fwd;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    const double finish = g.fwd_end[i] + work[i] / inst.node(plan.selected()[i]).rate;
    t2 = std::max(t2, finish - g.post_gap[i]);
  }
  return g.total_bwd + t2;
}

inline std::vector<double> equal_allocation(const Instance& inst, const CommPlan& plan) {
  return std::vector<double>(plan.size(), inst.workload() / static_cast<double>(plan.size()));
}

}  // namespace decsched
