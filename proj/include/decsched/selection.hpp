#pragma once

// Choosing which nodes take part. Each extra node adds its own transmissions
// to the shared channel, so beyond some point more nodes mean more delay.

#include <algorithm>
#include <cstddef>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string_view>
#include <vector>

#include "decsched/allocation.hpp"
#include "decsched/guard.hpp"
#include "decsched/model.hpp"
#include "decsched/numeric.hpp"
#include "decsched/ordering.hpp"

namespace decsched {

enum class SelectionMethod { kLinearUniform, kGreedy, kExhaustive };

inline std::string_view to_string(SelectionMethod m) {
  switch (m) {
    case SelectionMethod::kLinearUniform: return "LINEAR_UNIFORM";
    case SelectionMethod::kGreedy: return "GREEDY";
    case SelectionMethod::kExhaustive: return "EXHAUSTIVE";
  }
  return "?";
}

struct TraceEntry {
  std::size_t label = 0;  // subset size (linear, exhaustive) or candidate id (greedy)
  std::vector<NodeId> subset;
  double delay = 0.0;
};

struct SelectionResult {
  std::vector<NodeId> selected;
  CommPlan plan;
  double delay = 0.0;
  SelectionMethod method = SelectionMethod::kExhaustive;
  std::vector<TraceEntry> trace;
};

enum class RankBy { kCommDelay, kRate };

// Which delay the COMM_DELAY ranking looks at.
enum class CommKey { kSum, kForward, kBackward };

inline std::vector<NodeId> rank_nodes(const Instance& inst, RankBy by, CommKey key = CommKey::kSum) {
  std::vector<NodeId> ids = inst.all_ids();
  auto comm = [&](NodeId id) {
    const NodeSpec& n = inst.node(id);
    switch (key) {
      case CommKey::kForward: return n.fwd_delay;
      case CommKey::kBackward: return n.bwd_delay;
      case CommKey::kSum: break;
    }
    return n.fwd_delay + n.bwd_delay;
  };
  std::stable_sort(ids.begin(), ids.end(), [&](NodeId a, NodeId b) {
    if (by == RankBy::kCommDelay) {
      const double ca = comm(a), cb = comm(b);
      if (ca != cb) return ca < cb;
    } else {
      const double ra = inst.node(a).rate, rb = inst.node(b).rate;
      if (ra != rb) return ra > rb;
    }
    return a < b;
  });
  return ids;
}

namespace detail {

inline bool strictly_better(double candidate, double incumbent) {
  if (!std::isfinite(incumbent)) return candidate < incumbent;
  return candidate < incumbent - tolerance(candidate, incumbent);
}

}  // namespace detail

// Tries the k best-ranked nodes for every k, with the closed-form orders that
// are exact for the matching uniform case. O(N) delay evaluations.
inline SelectionResult select_linear(const Instance& inst, RankBy by, CommKey key = CommKey::kSum) {
  const std::vector<NodeId> ranked = rank_nodes(inst, by, key);
  const OrderPolicy policy{by == RankBy::kCommDelay ? OrderPolicy::Kind::kDescendingDelay
                                                    : OrderPolicy::Kind::kByRate};
  std::vector<TraceEntry> trace;
  std::size_t best = 0;
  for (std::size_t k = 1; k <= ranked.size(); ++k) {
    std::vector<NodeId> subset(ranked.begin(), ranked.begin() + k);
    std::sort(subset.begin(), subset.end());
    const double d = min_delay(inst, plan_with_policy(inst, subset, policy));
    trace.push_back({k, subset, d});
    if (k == 1 || detail::strictly_better(d, trace[best].delay)) best = k - 1;
  }
  const TraceEntry& win = trace[best];
  return SelectionResult{win.subset, plan_with_policy(inst, win.subset, policy), win.delay,
                         SelectionMethod::kLinearUniform, std::move(trace)};
}

// Starts from the best single node and keeps adding the node that lowers the
// delay most, while some node lowers it at all.
inline SelectionResult select_greedy(const Instance& inst, const OrderPolicy& policy, const Guard& guard = {}) {
  std::vector<TraceEntry> trace;
  std::vector<NodeId> current;
  double current_delay = std::numeric_limits<double>::infinity();
  std::vector<bool> in(inst.size(), false);

  while (current.size() < inst.size()) {
    std::optional<NodeId> pick;
    double pick_delay = current_delay;
    for (NodeId c = 0; c < inst.size(); ++c) {
      if (in[c]) continue;
      std::vector<NodeId> cand = current;
      cand.insert(std::upper_bound(cand.begin(), cand.end(), c), c);
      const double d = min_delay(inst, plan_with_policy(inst, cand, policy, guard));
      trace.push_back({c, cand, d});
      if (detail::strictly_better(d, pick_delay)) {
        pick = c;
        pick_delay = d;
      }
    }
    if (!pick) break;
    current.insert(std::upper_bound(current.begin(), current.end(), *pick), *pick);
    in[*pick] = true;
    current_delay = pick_delay;
  }
  CommPlan plan = plan_with_policy(inst, current, policy, guard);
  const double delay = min_delay(inst, plan);
  return SelectionResult{current, std::move(plan), delay, SelectionMethod::kGreedy, std::move(trace)};
}

// Every non-empty subset, by cardinality then lexicographically; a later
// subset wins only by strict improvement. The trace keeps the best delay per
// cardinality.
inline SelectionResult select_exhaustive(const Instance& inst, const OrderPolicy& policy, const Guard& guard = {}) {
  const std::size_t n = inst.size();
  guard.check_subsets(n);
  std::vector<TraceEntry> trace;
  std::vector<NodeId> best_subset;
  double best_delay = std::numeric_limits<double>::infinity();

  for (std::size_t c = 1; c <= n; ++c) {
    std::vector<NodeId> comb(c);
    std::iota(comb.begin(), comb.end(), NodeId{0});
    TraceEntry level{c, {}, std::numeric_limits<double>::infinity()};
    while (true) {
      const double d = min_delay(inst, plan_with_policy(inst, comb, policy, guard));
      if (best_subset.empty() || detail::strictly_better(d, best_delay)) {
        best_subset = comb;
        best_delay = d;
      }
      if (level.subset.empty() || detail::strictly_better(d, level.delay)) {
        level.subset = comb;
        level.delay = d;
      }
      // next combination in lexicographic order
      std::size_t i = c;
      while (i > 0 && comb[i - 1] == n - c + i - 1) --i;
      if (i == 0) break;
      ++comb[i - 1];
      for (std::size_t j = i; j < c; ++j) comb[j] = comb[j - 1] + 1;
    }
    trace.push_back(std::move(level));
  }
  CommPlan plan = plan_with_policy(inst, best_subset, policy, guard);
  return SelectionResult{best_subset, std::move(plan), best_delay, SelectionMethod::kExhaustive, std::move(trace)};
}

}  // namespace decsched
