#pragma once

// JSON renderings of results. nlohmann::json writes doubles in shortest
// round-trip form.

#include <nlohmann/json.hpp>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "decsched/allocation.hpp"
#include "decsched/model.hpp"
#include "decsched/ordering.hpp"
#include "decsched/selection.hpp"
#include "decsched/timeline.hpp"

namespace decsched {

inline nlohmann::json ids_json(std::span<const NodeId> ids) { return nlohmann::json(std::vector<NodeId>(ids.begin(), ids.end())); }

inline nlohmann::json to_json(const Allocation& a, double delay) {
  nlohmann::json per_node = nlohmann::json::array();
  for (const NodeShare& s : a.per_node) {
    per_node.push_back({{"id", s.id}, {"w1", s.phase1}, {"w2", s.phase2}, {"w3", s.phase3}, {"total", s.total}});
  }
  return {{"per_node", per_node}, {"delay", delay}};
}

inline nlohmann::json order_json(Direction dir, std::span<const NodeId> order, double v,
                                 std::optional<double> v_star = std::nullopt) {
  nlohmann::json j{{"direction", to_string(dir)}, {"order", ids_json(order)}, {"v", v}};
  if (v_star) j["v_star"] = *v_star;
  return j;
}

inline nlohmann::json plan_json(const CommPlan& p) {
  return {{"selected", ids_json(p.selected())}, {"fwd_order", ids_json(p.fwd_order())},
          {"bwd_order", ids_json(p.bwd_order())}};
}

inline nlohmann::json to_json(const SelectionResult& r) {
  nlohmann::json trace = nlohmann::json::array();
  for (const TraceEntry& e : r.trace) {
    trace.push_back({{"label", e.label}, {"subset", ids_json(e.subset)}, {"delay", e.delay}});
  }
  return {{"method", to_string(r.method)}, {"selected", ids_json(r.selected)}, {"plan", plan_json(r.plan)},
          {"delay", r.delay}, {"trace", trace}};
}

inline nlohmann::json to_json(const Timeline& t) {
  nlohmann::json channel = nlohmann::json::array();
  for (const ChannelInterval& c : t.channel) {
    channel.push_back({{"node", c.node}, {"dir", c.dir == Direction::kForward ? "FWD" : "BWD"},
                       {"start", c.start}, {"end", c.end}});
  }
  nlohmann::json compute = nlohmann::json::array();
  for (const NodeCompute& nc : t.compute) {
    nlohmann::json ivs = nlohmann::json::array();
    for (const Interval& iv : nc.intervals) ivs.push_back({iv.start, iv.end});
    compute.push_back({{"node", nc.node}, {"intervals", ivs}});
  }
  return {{"channel", channel}, {"compute", compute}, {"horizon", t.horizon}};
}

inline Timeline timeline_from_json(const nlohmann::json& j) {
  Timeline t;
  try {
    for (const auto& c : j.at("channel")) {
      const std::string dir = c.at("dir").get<std::string>();
      if (dir != "FWD" && dir != "BWD") throw InputError("timeline: dir must be FWD or BWD");
      t.channel.push_back({c.at("node").get<NodeId>(), dir == "FWD" ? Direction::kForward : Direction::kBackward,
                           c.at("start").get<double>(), c.at("end").get<double>()});
    }
    for (const auto& nc : j.at("compute")) {
      NodeCompute out{nc.at("node").get<NodeId>(), {}};
      for (const auto& iv : nc.at("intervals")) out.intervals.push_back({iv.at(0).get<double>(), iv.at(1).get<double>()});
      t.compute.push_back(std::move(out));
    }
    t.horizon = j.at("horizon").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("timeline: ") + e.what());
  }
  return t;
}

inline nlohmann::json to_json(const std::vector<Violation>& vs) {
  nlohmann::json out = nlohmann::json::array();
  for (const Violation& v : vs) {
    out.push_back({{"code", to_string(v.code)}, {"node", v.node}, {"intervals", v.intervals}, {"message", v.message}});
  }
  return out;
}

}  // namespace decsched
