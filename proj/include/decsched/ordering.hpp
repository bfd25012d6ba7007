#pragma once

// Transmission-order objectives and optimizers.
//
// With the three-phase allocation, the orders affect the delay only through the
// base capacity cap0 = v_forward + v_backward, where
//
//   v_backward(pi) = sum_p d[pi(p)] * sum_{q > p} r[pi(q)]
//   v_forward(pi)  = sum_p s[pi(p)] * sum_{q < p} r[pi(q)]
//
// The forward objective is the backward objective of the time-reversed
// sequence. Every optimizer below works on that "effective" sequence (the
// chronological order for BACKWARD, its reverse for FORWARD) and reports the
// chronological order.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <future>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "decsched/error.hpp"
#include "decsched/guard.hpp"
#include "decsched/model.hpp"
#include "decsched/numeric.hpp"

namespace decsched {

struct OrderValue {
  double v = 0.0;
  // Per-slot terms in effective-sequence order: terms[0] belongs to the first
  // backward slot, or to the last forward slot.
  std::vector<double> terms;
};

namespace detail {

inline void check_permutation(std::span<const NodeId> selected, std::span<const NodeId> order) {
  std::vector<NodeId> a(selected.begin(), selected.end()), b(order.begin(), order.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (a != b || std::adjacent_find(a.begin(), a.end()) != a.end()) {
    throw InputError("order is not a permutation of the selected nodes");
  }
}

inline std::vector<NodeId> effective(std::span<const NodeId> chrono, Direction dir) {
  std::vector<NodeId> e(chrono.begin(), chrono.end());
  if (dir == Direction::kForward) std::reverse(e.begin(), e.end());
  return e;
}

// Objective of a chronological order without validation.
inline double objective_unchecked(const Instance& inst, std::span<const NodeId> chrono, Direction dir) {
  double v = 0.0, rates = 0.0;
  const std::size_t n = chrono.size();
  if (dir == Direction::kBackward) {
    for (std::size_t p = n; p-- > 0;) {
      const NodeSpec& nd = inst.node(chrono[p]);
      v += nd.bwd_delay * rates;
      rates += nd.rate;
    }
  } else {
    for (std::size_t p = 0; p < n; ++p) {
      const NodeSpec& nd = inst.node(chrono[p]);
      v += nd.fwd_delay * rates;
      rates += nd.rate;
    }
  }
  return v;
}

inline double total_rate(const Instance& inst, std::span<const NodeId> ids) {
  double r = 0.0;
  for (NodeId id : ids) r += inst.node(id).rate;
  return r;
}

inline bool uniform_by(const Instance& inst, std::span<const NodeId> ids,
                       const std::function<double(const NodeSpec&)>& key) {
  return std::all_of(ids.begin(), ids.end(),
                     [&](NodeId id) { return key(inst.node(id)) == key(inst.node(ids.front())); });
}

}  // namespace detail

inline OrderValue objective_v(const Instance& inst, std::span<const NodeId> selected, std::span<const NodeId> order,
                              Direction dir) {
  detail::check_permutation(selected, order);
  const std::vector<NodeId> eff = detail::effective(order, dir);
  OrderValue out;
  out.terms.resize(eff.size());
  double rates_after = detail::total_rate(inst, eff);
  for (std::size_t p = 0; p < eff.size(); ++p) {
    const NodeSpec& nd = inst.node(eff[p]);
    rates_after -= nd.rate;
    out.terms[p] = nd.delay(dir) * std::max(0.0, rates_after);
    out.v += out.terms[p];
  }
  return out;
}

// Optimal for uniform rates: BACKWARD by descending d, FORWARD by ascending s.
inline std::vector<NodeId> order_descending_delay(const Instance& inst, std::span<const NodeId> selected,
                                                  Direction dir) {
  std::vector<NodeId> order(selected.begin(), selected.end());
  std::stable_sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
    const double da = inst.node(a).delay(dir), db = inst.node(b).delay(dir);
    if (da != db) return dir == Direction::kBackward ? da > db : da < db;
    return a < b;
  });
  return order;
}

// Optimal for uniform delays: BACKWARD by ascending rate (fastest last),
// FORWARD by descending rate (fastest first).
inline std::vector<NodeId> order_by_rate(const Instance& inst, std::span<const NodeId> selected, Direction dir) {
  std::vector<NodeId> order(selected.begin(), selected.end());
  std::stable_sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
    const double ra = inst.node(a).rate, rb = inst.node(b).rate;
    if (ra != rb) return dir == Direction::kBackward ? ra < rb : ra > rb;
    return a < b;
  });
  return order;
}

enum class SuffixFill {
  kAscendingId,       // unused ids in ascending order
  kDescendingDelay,   // unused ids ordered like order_descending_delay
};

struct GreedyOrder {
  std::vector<NodeId> order;  // chronological
  double prefix_v = 0.0;      // sum of the first k effective terms
  double v = 0.0;             // full objective of `order`
};

namespace detail {

inline std::vector<NodeId> assemble(const Instance& inst, std::span<const NodeId> eff_prefix,
                                    std::vector<NodeId> unused, Direction dir, SuffixFill fill) {
  std::sort(unused.begin(), unused.end());
  if (fill == SuffixFill::kDescendingDelay) unused = order_descending_delay(inst, unused, dir);
  std::vector<NodeId> chrono;
  chrono.reserve(eff_prefix.size() + unused.size());
  if (dir == Direction::kBackward) {
    chrono.assign(eff_prefix.begin(), eff_prefix.end());
    chrono.insert(chrono.end(), unused.begin(), unused.end());
  } else {
    chrono = unused;
    chrono.insert(chrono.end(), eff_prefix.rbegin(), eff_prefix.rend());
  }
  return chrono;
}

}  // namespace detail

// Best ordering of the first k effective slots over all ordered k-tuples; the
// other slots are filled per `fill`. Among equal prefix values the
// lexicographically smallest chronological order wins.
inline GreedyOrder order_greedy_prefix(const Instance& inst, std::span<const NodeId> selected, Direction dir,
                                       std::size_t k, SuffixFill fill = SuffixFill::kAscendingId) {
  const std::size_t n = selected.size();
  if (k < 1 || k > n) {
    throw InputError("prefix length k=" + std::to_string(k) + " must be in 1.." + std::to_string(n));
  }
  std::vector<NodeId> ids(selected.begin(), selected.end());
  std::sort(ids.begin(), ids.end());
  const double total = detail::total_rate(inst, ids);

  std::vector<NodeId> tuple;
  std::vector<bool> used(n, false);
  std::optional<GreedyOrder> best;

  auto consider = [&](double prefix_v) {
    if (best && prefix_v < best->prefix_v) return;
    std::vector<NodeId> unused;
    for (std::size_t i = 0; i < n; ++i) {
      if (!used[i]) unused.push_back(ids[i]);
    }
    std::vector<NodeId> chrono = detail::assemble(inst, tuple, std::move(unused), dir, fill);
    if (best && prefix_v == best->prefix_v && !(chrono < best->order)) return;
    best = GreedyOrder{std::move(chrono), prefix_v, 0.0};
  };

  std::function<void(double, double)> dfs = [&](double prefix_v, double rates_left) {
    if (tuple.size() == k) {
      consider(prefix_v);
      return;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (used[i]) continue;
      const NodeSpec& nd = inst.node(ids[i]);
      const double left = rates_left - nd.rate;
      used[i] = true;
      tuple.push_back(ids[i]);
      dfs(prefix_v + nd.delay(dir) * std::max(0.0, left), left);
      tuple.pop_back();
      used[i] = false;
    }
  };
  dfs(0.0, total);

  best->v = detail::objective_unchecked(inst, best->order, dir);
  return *std::move(best);
}

struct ExhaustiveOrder {
  std::vector<NodeId> order;
  double v_star = 0.0;
};

// Maximizer over all n! chronological orders; ties go to the lexicographically
// smallest. Work is split by leading node across threads and merged in
// leading-node order, so the result matches a sequential scan.
inline ExhaustiveOrder order_exhaustive(const Instance& inst, std::span<const NodeId> selected, Direction dir,
                                        const Guard& guard = {}) {
  guard.check_order(selected.size());
  std::vector<NodeId> ids(selected.begin(), selected.end());
  std::sort(ids.begin(), ids.end());
  const std::size_t n = ids.size();

  auto scan_from = [&inst, dir, ids](std::size_t lead) {
    std::vector<NodeId> perm;
    perm.push_back(ids[lead]);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (i != lead) perm.push_back(ids[i]);
    }
    ExhaustiveOrder best{perm, -std::numeric_limits<double>::infinity()};
    do {
      const double v = detail::objective_unchecked(inst, perm, dir);
      if (v > best.v_star) best = ExhaustiveOrder{perm, v};
    } while (std::next_permutation(perm.begin() + 1, perm.end()));
    return best;
  };

  std::vector<ExhaustiveOrder> partial(n);
  if (n >= 8) {
    std::vector<std::future<ExhaustiveOrder>> jobs;
    for (std::size_t lead = 0; lead < n; ++lead) jobs.push_back(std::async(std::launch::async, scan_from, lead));
    for (std::size_t lead = 0; lead < n; ++lead) partial[lead] = jobs[lead].get();
  } else {
    for (std::size_t lead = 0; lead < n; ++lead) partial[lead] = scan_from(lead);
  }
  ExhaustiveOrder best = partial.front();
  for (std::size_t lead = 1; lead < n; ++lead) {
    if (partial[lead].v_star > best.v_star) best = partial[lead];
  }
  return best;
}

// ---------------------------------------------------------------------------
// Counterexamples for the closed-form orders on diverse instances.

enum class CounterexampleKind {
  kLDF,  // largest delay first
  kFCL,  // fastest computing node last
};

inline CounterexampleKind parse_counterexample_kind(std::string_view s) {
  if (s == "LDF" || s == "ldf") return CounterexampleKind::kLDF;
  if (s == "FCL" || s == "fcl") return CounterexampleKind::kFCL;
  throw InputError("unknown counterexample kind '" + std::string(s) + "'");
}

// LDF: delays n, n-1, ..., 1 and rates (scale, 1, ..., 1); LDF sends the very
// fast node 0 first, the optimum defers it.
// FCL: rates 1, 2, ..., n and delays (1, ..., 1, scale); FCL sends node n-1's
// long transmission last. Both directions use the same delay.
inline Instance counterexample(CounterexampleKind kind, std::size_t n, double scale,
                               double workload = kDefaultWorkload) {
  if (n < 2) throw InputError("counterexample needs n >= 2");
  if (!(scale >= 1.0) || !std::isfinite(scale)) throw InputError("counterexample needs finite scale >= 1");
  std::vector<NodeSpec> nodes(n);
  for (NodeId i = 0; i < n; ++i) {
    double rate = 1.0, delay = 1.0;
    if (kind == CounterexampleKind::kLDF) {
      delay = static_cast<double>(n - i);
      rate = i == 0 ? scale : 1.0;
    } else {
      rate = static_cast<double>(i + 1);
      delay = i + 1 == n ? scale : 1.0;
    }
    nodes[i] = NodeSpec{i, rate, delay, delay};
  }
  return Instance(workload, std::move(nodes));
}

struct RatioCheck {
  double prefix_v = 0.0;  // greedy's first-k value
  double v = 0.0;         // greedy's full value
  double v_star = 0.0;
  bool bound_holds = false;  // prefix_v >= (k/n) v*
};

inline RatioCheck verify_ratio(const Instance& inst, std::span<const NodeId> selected, Direction dir,
                               std::size_t k, const Guard& guard = {}) {
  const ExhaustiveOrder opt = order_exhaustive(inst, selected, dir, guard);
  const GreedyOrder g = order_greedy_prefix(inst, selected, dir, k);
  const double n = static_cast<double>(selected.size());
  RatioCheck r{g.prefix_v, g.v, opt.v_star, false};
  r.bound_holds = g.prefix_v >= (static_cast<double>(k) / n) * opt.v_star - kRelTol * opt.v_star;
  return r;
}

// ---------------------------------------------------------------------------
// Order policies used by selection and the CLI.

struct OrderPolicy {
  enum class Kind {
    kExhaustive,
    kGreedyPrefix,
    kDescendingDelay,  // "ldf"
    kByRate,           // "rate"
    kIdentity,         // "aco"
    kAuto,             // closed form when it is exact, exhaustive otherwise
  };
  Kind kind = Kind::kExhaustive;
  std::size_t k = 1;
  SuffixFill fill = SuffixFill::kAscendingId;

  static OrderPolicy parse(std::string_view s) {
    OrderPolicy p;
    if (s == "exhaustive") p.kind = Kind::kExhaustive;
    else if (s == "ldf") p.kind = Kind::kDescendingDelay;
    else if (s == "rate") p.kind = Kind::kByRate;
    else if (s == "aco") p.kind = Kind::kIdentity;
    else if (s == "auto") p.kind = Kind::kAuto;
    else if (s.rfind("greedy:", 0) == 0) {
      p.kind = Kind::kGreedyPrefix;
      const std::string num(s.substr(7));
      try {
        std::size_t used = 0;
        const long long k = std::stoll(num, &used);
        if (used != num.size() || k < 1) throw std::invalid_argument(num);
        p.k = static_cast<std::size_t>(k);
      } catch (const std::exception&) {
        throw InputError("bad prefix length in order policy '" + std::string(s) + "'");
      }
    } else {
      throw InputError("unknown order policy '" + std::string(s) + "'");
    }
    return p;
  }

  std::string name() const {
    switch (kind) {
      case Kind::kExhaustive: return "exhaustive";
      case Kind::kGreedyPrefix: return "greedy:" + std::to_string(k);
      case Kind::kDescendingDelay: return "ldf";
      case Kind::kByRate: return "rate";
      case Kind::kIdentity: return "aco";
      case Kind::kAuto: return "auto";
    }
    return "?";
  }
};

inline std::vector<NodeId> order_with_policy(const Instance& inst, std::span<const NodeId> selected, Direction dir,
                                             const OrderPolicy& policy, const Guard& guard = {}) {
  std::vector<NodeId> ids(selected.begin(), selected.end());
  std::sort(ids.begin(), ids.end());
  using K = OrderPolicy::Kind;
  switch (policy.kind) {
    case K::kExhaustive: return order_exhaustive(inst, ids, dir, guard).order;
    case K::kGreedyPrefix:
      return order_greedy_prefix(inst, ids, dir, std::min(policy.k, ids.size()), policy.fill).order;
    case K::kDescendingDelay: return order_descending_delay(inst, ids, dir);
    case K::kByRate: return order_by_rate(inst, ids, dir);
    case K::kIdentity: return ids;
    case K::kAuto: {
      if (detail::uniform_by(inst, ids, [](const NodeSpec& n) { return n.rate; })) {
        return order_descending_delay(inst, ids, dir);
      }
      if (detail::uniform_by(inst, ids, [dir](const NodeSpec& n) { return n.delay(dir); })) {
        return order_by_rate(inst, ids, dir);
      }
      if (guard.disabled || ids.size() <= guard.order_limit) return order_exhaustive(inst, ids, dir, guard).order;
      return order_greedy_prefix(inst, ids, dir, std::min<std::size_t>(2, ids.size()), policy.fill).order;
    }
  }
  throw InvariantError("unhandled order policy");
}

inline CommPlan plan_with_policy(const Instance& inst, std::span<const NodeId> selected, const OrderPolicy& policy,
                                 const Guard& guard = {}) {
  std::vector<NodeId> ids(selected.begin(), selected.end());
  return CommPlan(ids, order_with_policy(inst, ids, Direction::kForward, policy, guard),
                  order_with_policy(inst, ids, Direction::kBackward, policy, guard));
}

}  // namespace decsched
