#pragma once

// Explicit schedules: channel occupancy plus per-node compute intervals.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "decsched/allocation.hpp"
#include "decsched/error.hpp"
#include "decsched/model.hpp"
#include "decsched/numeric.hpp"

namespace decsched {

struct Interval {
  double start = 0.0;
  double end = 0.0;
  double length() const { return end - start; }
};

struct ChannelInterval {
  NodeId node = 0;
  Direction dir = Direction::kForward;
  double start = 0.0;
  double end = 0.0;
};

struct NodeCompute {
  NodeId node = 0;
  std::vector<Interval> intervals;
};

struct Timeline {
  std::vector<ChannelInterval> channel;  // in start order for built/sampled timelines
  std::vector<NodeCompute> compute;      // one entry per selected node
  double horizon = 0.0;

  void recompute_horizon() {
    horizon = 0.0;
    for (const ChannelInterval& c : channel) horizon = std::max(horizon, c.end);
    for (const NodeCompute& nc : compute) {
      for (const Interval& iv : nc.intervals) horizon = std::max(horizon, iv.end);
    }
  }
};

// Forward transmissions back to back from 0 in plan order, each node computing
// right after its own forward transmission, backward transmissions back to
// back ending at the horizon.
inline Timeline build_canonical(const Instance& inst, const CommPlan& plan, std::span<const double> work) {
  const double horizon = delay_of_fixed_allocation(inst, plan, work);
  const GapProfile g = gap_profile(inst, plan);
  Timeline t;
  double clock = 0.0;
  for (NodeId id : plan.fwd_order()) {
    const double s = inst.node(id).fwd_delay;
    t.channel.push_back({id, Direction::kForward, clock, clock + s});
    clock += s;
  }
  clock = horizon - g.total_bwd;
  for (NodeId id : plan.bwd_order()) {
    const double d = inst.node(id).bwd_delay;
    t.channel.push_back({id, Direction::kBackward, clock, clock + d});
    clock += d;
  }
  for (std::size_t i = 0; i < plan.size(); ++i) {
    NodeCompute nc{plan.selected()[i], {}};
    if (work[i] > 0.0) {
      const double start = g.fwd_end[i];
      nc.intervals.push_back({start, start + work[i] / inst.node(nc.node).rate});
    }
    t.compute.push_back(std::move(nc));
  }
  t.horizon = horizon;
  return t;
}

inline Timeline build_canonical(const Instance& inst, const CommPlan& plan, const Allocation& alloc) {
  const std::vector<double> work = alloc.totals();
  return build_canonical(inst, plan, work);
}

// ---------------------------------------------------------------------------
// Validation

enum class ViolationCode { kOverlap, kPrecedence, kBudget, kWorkload, kMalformed };

inline std::string_view to_string(ViolationCode c) {
  switch (c) {
    case ViolationCode::kOverlap: return "OVERLAP";
    case ViolationCode::kPrecedence: return "PRECEDENCE";
    case ViolationCode::kBudget: return "BUDGET";
    case ViolationCode::kWorkload: return "WORKLOAD";
    case ViolationCode::kMalformed: return "MALFORMED";
  }
  return "?";
}

struct Violation {
  ViolationCode code;
  NodeId node = 0;
  // Channel interval indices for OVERLAP/PRECEDENCE on the channel; compute
  // interval indices (within the node) otherwise.
  std::vector<std::size_t> intervals;
  std::string message;
};

// `work` is indexed like `selected`.
inline std::vector<Violation> validate(const Timeline& t, const Instance& inst, std::span<const NodeId> selected,
                                       std::span<const double> work) {
  std::vector<Violation> out;
  auto index_of = [&](NodeId id) -> std::optional<std::size_t> {
    auto it = std::find(selected.begin(), selected.end(), id);
    if (it == selected.end()) return std::nullopt;
    return static_cast<std::size_t>(it - selected.begin());
  };
  const std::size_t n = selected.size();

  // malformed intervals / unknown nodes
  for (std::size_t k = 0; k < t.channel.size(); ++k) {
    const ChannelInterval& c = t.channel[k];
    if (!(c.end >= c.start) || !std::isfinite(c.start) || !std::isfinite(c.end) || c.start < -kAbsTol) {
      out.push_back({ViolationCode::kMalformed, c.node, {k}, "channel interval has negative length"});
    }
    if (!index_of(c.node)) {
      out.push_back({ViolationCode::kMalformed, c.node, {k}, "channel interval for an unselected node"});
    }
  }

  // complete interference: at most one transmitter at a time
  std::vector<std::size_t> by_start(t.channel.size());
  std::iota(by_start.begin(), by_start.end(), std::size_t{0});
  std::stable_sort(by_start.begin(), by_start.end(),
                   [&](std::size_t a, std::size_t b) { return t.channel[a].start < t.channel[b].start; });
  for (std::size_t i = 1; i < by_start.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      const ChannelInterval& a = t.channel[by_start[j]];
      const ChannelInterval& b = t.channel[by_start[i]];
      const double overlap = std::min(a.end, b.end) - std::max(a.start, b.start);
      if (overlap > tolerance(a.end, b.start)) {
        out.push_back({ViolationCode::kOverlap, b.node, {by_start[j], by_start[i]},
                       "channel intervals overlap by " + format_double(overlap) + " s"});
      }
    }
  }

  std::vector<double> fwd_time(n, 0.0), bwd_time(n, 0.0), fwd_last_end(n, 0.0);
  std::vector<double> bwd_first_start(n, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> bwd_first_index(n, 0);
  for (std::size_t k = 0; k < t.channel.size(); ++k) {
    const ChannelInterval& c = t.channel[k];
    const auto i = index_of(c.node);
    if (!i) continue;
    if (c.dir == Direction::kForward) {
      fwd_time[*i] += c.end - c.start;
      fwd_last_end[*i] = std::max(fwd_last_end[*i], c.end);
    } else {
      bwd_time[*i] += c.end - c.start;
      if (c.start < bwd_first_start[*i]) {
        bwd_first_start[*i] = c.start;
        bwd_first_index[*i] = k;
      }
    }
  }

  std::vector<const NodeCompute*> comp(n, nullptr);
  for (const NodeCompute& nc : t.compute) {
    const auto i = index_of(nc.node);
    if (!i) {
      out.push_back({ViolationCode::kMalformed, nc.node, {}, "compute entry for an unselected node"});
      continue;
    }
    comp[*i] = &nc;
  }

  for (std::size_t i = 0; i < n; ++i) {
    const NodeId id = selected[i];
    const NodeSpec& spec = inst.node(id);
    if (!approx_eq(fwd_time[i], spec.fwd_delay)) {
      out.push_back({ViolationCode::kBudget, id, {},
                     "forward channel time " + format_double(fwd_time[i]) + " != " + format_double(spec.fwd_delay)});
    }
    if (!approx_eq(bwd_time[i], spec.bwd_delay)) {
      out.push_back({ViolationCode::kBudget, id, {},
                     "backward channel time " + format_double(bwd_time[i]) + " != " + format_double(spec.bwd_delay)});
    }
    // backward transmission never precedes the end of the forward one
    for (std::size_t k = 0; k < t.channel.size(); ++k) {
      const ChannelInterval& c = t.channel[k];
      if (c.node == id && c.dir == Direction::kBackward && !approx_ge(c.start, fwd_last_end[i])) {
        out.push_back({ViolationCode::kPrecedence, id, {k}, "backward transmission before forward transmission ends"});
      }
    }

    double computed = 0.0;
    double slack = 0.0;  // endpoint rounding, in seconds
    if (comp[i] != nullptr) {
      std::vector<Interval> ivs = comp[i]->intervals;
      for (std::size_t k = 0; k < ivs.size(); ++k) {
        const Interval& iv = ivs[k];
        if (!(iv.end >= iv.start)) {
          out.push_back({ViolationCode::kMalformed, id, {k}, "compute interval has negative length"});
          continue;
        }
        computed += iv.length();
        slack += tolerance(iv.start, iv.end);
        if (!approx_ge(iv.start, fwd_last_end[i])) {
          out.push_back({ViolationCode::kPrecedence, id, {k}, "computation starts before forward transmission ends"});
        }
        if (!approx_le(iv.end, bwd_first_start[i])) {
          out.push_back({ViolationCode::kPrecedence, id, {k, bwd_first_index[i]},
                         "backward transmission starts before computation ends"});
        }
      }
      std::vector<std::size_t> order(ivs.size());
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ivs[a].start < ivs[b].start; });
      for (std::size_t k = 1; k < order.size(); ++k) {
        const Interval& a = ivs[order[k - 1]];
        const Interval& b = ivs[order[k]];
        if (a.end - b.start > tolerance(a.end, b.start)) {
          out.push_back({ViolationCode::kOverlap, id, {order[k - 1], order[k]}, "compute intervals overlap"});
        }
      }
    }
    // compared in time: lengths of short intervals far from 0 carry endpoint rounding
    const double done = computed * spec.rate;
    if (computed + slack < work[i] / spec.rate && !approx_ge(done, work[i])) {
      out.push_back({ViolationCode::kWorkload, id, {},
                     "computes " + format_double(done) + " of allocated " + format_double(work[i])});
    }
  }

  double latest = 0.0;
  for (const ChannelInterval& c : t.channel) latest = std::max(latest, c.end);
  for (const NodeCompute& nc : t.compute) {
    for (const Interval& iv : nc.intervals) latest = std::max(latest, iv.end);
  }
  if (!approx_eq(latest, t.horizon)) {
    out.push_back({ViolationCode::kMalformed, 0, {}, "horizon " + format_double(t.horizon) +
                                                         " differs from latest end " + format_double(latest)});
  }
  return out;
}

inline std::vector<Violation> validate(const Timeline& t, const Instance& inst, const CommPlan& plan,
                                       const Allocation& alloc) {
  const std::vector<double> work = alloc.totals();
  return validate(t, inst, plan.selected(), work);
}

// ---------------------------------------------------------------------------
// Adversarial sampling

struct SampleFeatures {
  bool preempt = false;     // split transmissions into pieces
  bool idle = false;        // insert idle gaps on the channel and before/within computations
  bool interleave = false;  // mix backward transmissions in among forward ones

  bool any() const { return preempt || idle || interleave; }
};

inline constexpr int kMaxSplits = 3;

namespace detail {

struct Piece {
  NodeId node;
  Direction dir;
  double length;
};

inline std::vector<double> random_split(double total, int parts, std::mt19937_64& rng) {
  if (parts <= 1 || total <= 0.0) return {total};
  std::vector<double> w(parts);
  for (double& x : w) x = 0.05 + unit_draw(rng);
  const double sum = std::accumulate(w.begin(), w.end(), 0.0);
  double used = 0.0;
  for (int i = 0; i + 1 < parts; ++i) {
    w[i] = total * w[i] / sum;
    used += w[i];
  }
  w.back() = std::max(0.0, total - used);
  return w;
}

inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>(unit_draw(rng) * static_cast<double>(n));
}

}  // namespace detail

// A valid, deliberately non-canonical schedule for the given plan and per-node
// workloads (indexed like plan.selected()). The plan's forward order is kept
// as the order of forward completions and its backward order as the order of
// first backward starts. Interleaving happens where precedence admits it.
inline Timeline sample_adversarial(const Instance& inst, const CommPlan& plan, std::span<const double> work,
                                   std::uint64_t seed, SampleFeatures features) {
  check_fixed_allocation(inst, plan, work);
  const std::size_t n = plan.size();
  if (features.interleave && n < 2) {
    throw InputError("interleaving needs at least two selected nodes");
  }
  if (!features.any()) return build_canonical(inst, plan, work);

  std::mt19937_64 rng(seed);
  auto pieces_for = [&](double len, bool force_split) {
    int parts = 1;
    if (features.preempt && len > 0.0) {
      parts = 1 + static_cast<int>(detail::uniform_index(rng, kMaxSplits + 1));
      if (force_split) parts = std::max(parts, 2);
    }
    return detail::random_split(len, parts, rng);
  };

  // Forward: final pieces in plan order, earlier pieces anywhere before the
  // node's first piece placed so far (hence before its final piece).
  std::vector<detail::Piece> fwd;
  std::vector<std::vector<double>> fwd_parts(n);
  bool forced = false;
  for (std::size_t p = 0; p < n; ++p) {
    const NodeId id = plan.fwd_order()[p];
    const double s = inst.node(id).fwd_delay;
    fwd_parts[p] = pieces_for(s, features.preempt && !forced && s > 0.0);
    if (fwd_parts[p].size() > 1) forced = true;
    fwd.push_back({id, Direction::kForward, fwd_parts[p].back()});
  }
  for (std::size_t p = 0; p < n; ++p) {
    const NodeId id = plan.fwd_order()[p];
    for (std::size_t k = 0; k + 1 < fwd_parts[p].size(); ++k) {
      const auto final_at = static_cast<std::size_t>(
          std::find_if(fwd.begin(), fwd.end(), [&](const detail::Piece& x) { return x.node == id; }) - fwd.begin());
      fwd.insert(fwd.begin() + static_cast<std::ptrdiff_t>(detail::uniform_index(rng, final_at + 1)),
                 {id, Direction::kForward, fwd_parts[p][k]});
    }
  }

  // Backward: first pieces in plan order, later pieces anywhere after their first piece.
  std::vector<detail::Piece> bwd;
  std::vector<std::vector<double>> bwd_parts(n);
  for (std::size_t p = 0; p < n; ++p) {
    const NodeId id = plan.bwd_order()[p];
    bwd_parts[p] = pieces_for(inst.node(id).bwd_delay, false);
    bwd.push_back({id, Direction::kBackward, bwd_parts[p].front()});
  }
  for (std::size_t p = 0; p < n; ++p) {
    const NodeId id = plan.bwd_order()[p];
    for (std::size_t k = 1; k < bwd_parts[p].size(); ++k) {
      const auto last_at = static_cast<std::size_t>(
          std::find_if(bwd.rbegin(), bwd.rend(), [&](const detail::Piece& x) { return x.node == id; }).base() -
          bwd.begin());
      const std::size_t room = bwd.size() - last_at;
      bwd.insert(bwd.begin() + static_cast<std::ptrdiff_t>(last_at + detail::uniform_index(rng, room + 1)),
                 {id, Direction::kBackward, bwd_parts[p][k]});
    }
  }

  auto sel_index = [&](NodeId id) {
    return static_cast<std::size_t>(std::lower_bound(plan.selected().begin(), plan.selected().end(), id) -
                                    plan.selected().begin());
  };
  std::vector<std::size_t> fwd_left(n, 0);
  for (const detail::Piece& pc : fwd) ++fwd_left[sel_index(pc.node)];

  double comm_total = 0.0;
  for (const detail::Piece& pc : fwd) comm_total += pc.length;
  for (const detail::Piece& pc : bwd) comm_total += pc.length;
  double idle_budget = 2.0 * comm_total;
  auto draw_idle = [&]() {
    if (!features.idle || idle_budget <= 0.0 || unit_draw(rng) < 0.5) return 0.0;
    const double scale = std::max(comm_total, 1.0) / static_cast<double>(2 * n);
    const double gap = std::min(idle_budget, unit_draw(rng) * scale);
    idle_budget -= gap;
    return gap;
  };

  Timeline t;
  t.compute.resize(n);
  for (std::size_t i = 0; i < n; ++i) t.compute[i].node = plan.selected()[i];
  std::vector<double> ready(n, 0.0);  // earliest backward start

  auto finish_forward = [&](std::size_t i, double fwd_end) {
    const NodeId id = plan.selected()[i];
    double clock = fwd_end + draw_idle();
    double need = work[i] / inst.node(id).rate;
    if (need > 0.0) {
      const int parts = features.idle ? 1 + static_cast<int>(detail::uniform_index(rng, 2)) : 1;
      const std::vector<double> chunks = detail::random_split(need, parts, rng);
      for (std::size_t k = 0; k < chunks.size(); ++k) {
        if (k > 0) clock += draw_idle();
        t.compute[i].intervals.push_back({clock, clock + chunks[k]});
        clock += chunks[k];
      }
    }
    ready[i] = need > 0.0 ? clock : fwd_end;
  };

  double clock = 0.0;
  std::size_t fi = 0, bi = 0;
  while (fi < fwd.size() || bi < bwd.size()) {
    bool take_bwd = fi == fwd.size();
    if (!take_bwd && bi < bwd.size() && features.interleave) {
      const bool allowed = fwd_left[sel_index(bwd[bi].node)] == 0;
      take_bwd = allowed && unit_draw(rng) < 0.5;
    }
    if (take_bwd) {
      const detail::Piece& pc = bwd[bi++];
      const std::size_t i = sel_index(pc.node);
      const double start = std::max(clock + draw_idle(), ready[i]);
      t.channel.push_back({pc.node, pc.dir, start, start + pc.length});
      clock = start + pc.length;
    } else {
      const detail::Piece& pc = fwd[fi++];
      const std::size_t i = sel_index(pc.node);
      const double start = clock + draw_idle();
      t.channel.push_back({pc.node, pc.dir, start, start + pc.length});
      clock = start + pc.length;
      if (--fwd_left[i] == 0) finish_forward(i, clock);
    }
  }
  t.recompute_horizon();
  return t;
}

// Orders observed in a timeline: forward by completion, backward by first start.
inline CommPlan induced_plan(const Timeline& t, std::span<const NodeId> selected) {
  std::vector<std::pair<double, NodeId>> fwd_end, bwd_start;
  for (NodeId id : selected) {
    double fe = 0.0, bs = std::numeric_limits<double>::infinity();
    for (const ChannelInterval& c : t.channel) {
      if (c.node != id) continue;
      if (c.dir == Direction::kForward) fe = std::max(fe, c.end);
      else bs = std::min(bs, c.start);
    }
    fwd_end.emplace_back(fe, id);
    bwd_start.emplace_back(bs, id);
  }
  std::stable_sort(fwd_end.begin(), fwd_end.end());
  std::stable_sort(bwd_start.begin(), bwd_start.end());
  std::vector<NodeId> f, b;
  for (const auto& [_, id] : fwd_end) f.push_back(id);
  for (const auto& [_, id] : bwd_start) b.push_back(id);
  return CommPlan(std::vector<NodeId>(selected.begin(), selected.end()), f, b);
}

// ---------------------------------------------------------------------------
// Text Gantt chart: a channel row showing which node transmits, then one row
// per node with '>' forward, '#' compute, '<' backward, '.' idle.

inline std::string render_gantt(const Timeline& t, std::size_t width = 64) {
  if (width < 8) width = 8;
  const double span = t.horizon > 0.0 ? t.horizon : 1.0;
  auto cell_range = [&](double a, double b) {
    auto lo = static_cast<std::size_t>(std::floor(a / span * static_cast<double>(width) + 1e-9));
    auto hi = static_cast<std::size_t>(std::ceil(b / span * static_cast<double>(width) - 1e-9));
    lo = std::min(lo, width);
    hi = std::min(std::max(hi, lo + (b > a ? 1 : 0)), width);
    return std::pair{lo, hi};
  };
  auto id_char = [](NodeId id) {
    constexpr const char* kDigits = "0123456789abcdefghijklmnopqrstuvwxyz";
    return id < 36 ? kDigits[id] : '*';
  };

  std::ostringstream os;
  std::string chan(width, '-');
  for (const ChannelInterval& c : t.channel) {
    auto [lo, hi] = cell_range(c.start, c.end);
    for (std::size_t x = lo; x < hi; ++x) chan[x] = id_char(c.node);
  }
  os << "channel |" << chan << "|\n";
  for (const NodeCompute& nc : t.compute) {
    std::string row(width, '.');
    for (const Interval& iv : nc.intervals) {
      auto [lo, hi] = cell_range(iv.start, iv.end);
      for (std::size_t x = lo; x < hi; ++x) row[x] = '#';
    }
    for (const ChannelInterval& c : t.channel) {
      if (c.node != nc.node) continue;
      auto [lo, hi] = cell_range(c.start, c.end);
      for (std::size_t x = lo; x < hi; ++x) row[x] = c.dir == Direction::kForward ? '>' : '<';
    }
    std::string label = "node " + std::to_string(nc.node);
    label.resize(8, ' ');
    os << label << "|" << row << "|\n";
  }
  os << "horizon " << format_double(t.horizon) << " s\n";
  return os.str();
}

}  // namespace decsched
