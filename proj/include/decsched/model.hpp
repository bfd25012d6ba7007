#pragma once

// Problem instances, communication plans, instance generation and JSON I/O.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <iterator>
#include <nlohmann/json.hpp>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "decsched/error.hpp"
#include "decsched/numeric.hpp"

namespace decsched {

using NodeId = std::size_t;

enum class Direction { kForward, kBackward };

inline std::string_view to_string(Direction d) {
  return d == Direction::kForward ? "FORWARD" : "BACKWARD";
}

struct NodeSpec {
  NodeId id = 0;
  double rate = 1.0;       // workload units per second
  double fwd_delay = 0.0;  // seconds
  double bwd_delay = 0.0;  // seconds

  double delay(Direction d) const { return d == Direction::kForward ? fwd_delay : bwd_delay; }

  friend bool operator==(const NodeSpec&, const NodeSpec&) = default;
};

// Total workload plus the worker nodes. Node ids are the dense indices 0..N-1.
class Instance {
 public:
  Instance(double workload, std::vector<NodeSpec> nodes)
      : workload_(workload), nodes_(std::move(nodes)) {
    validate();
  }

  double workload() const { return workload_; }
  std::span<const NodeSpec> nodes() const { return nodes_; }
  const NodeSpec& node(NodeId id) const { return nodes_.at(id); }
  std::size_t size() const { return nodes_.size(); }

  Instance with_workload(double w) const { return Instance(w, nodes_); }

  // First n nodes, keeping ids.
  Instance prefix(std::size_t n) const {
    if (n == 0 || n > nodes_.size()) throw InputError("prefix size out of range");
    return Instance(workload_, std::vector<NodeSpec>(nodes_.begin(), nodes_.begin() + n));
  }

  std::vector<NodeId> all_ids() const {
    std::vector<NodeId> ids(nodes_.size());
    for (NodeId i = 0; i < ids.size(); ++i) ids[i] = i;
    return ids;
  }

  friend bool operator==(const Instance&, const Instance&) = default;

 private:
  void validate() const {
    if (!std::isfinite(workload_) || workload_ < 0.0) {
      throw InputError("workload must be finite and >= 0");
    }
    if (nodes_.empty()) throw InputError("instance needs at least one node");
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const NodeSpec& n = nodes_[i];
      const std::string where = "node " + std::to_string(i) + ": ";
      if (n.id != i) throw InputError(where + "id must equal its index (ids are dense 0..N-1)");
      if (!std::isfinite(n.rate) || n.rate <= 0.0) throw InputError(where + "rate must be > 0");
      if (!std::isfinite(n.fwd_delay) || n.fwd_delay < 0.0) {
        throw InputError(where + "fwd_delay must be >= 0");
      }
      if (!std::isfinite(n.bwd_delay) || n.bwd_delay < 0.0) {
        throw InputError(where + "bwd_delay must be >= 0");
      }
    }
  }

  double workload_;
  std::vector<NodeSpec> nodes_;
};

// A node subset with forward and backward transmission orders over it.
class CommPlan {
 public:
  CommPlan(std::vector<NodeId> selected, std::vector<NodeId> fwd_order, std::vector<NodeId> bwd_order)
      : selected_(std::move(selected)), fwd_(std::move(fwd_order)), bwd_(std::move(bwd_order)) {
    if (selected_.empty()) throw InputError("plan must select at least one node");
    std::sort(selected_.begin(), selected_.end());
    if (std::adjacent_find(selected_.begin(), selected_.end()) != selected_.end()) {
      throw InputError("plan selects a node twice");
    }
    const std::size_t span = selected_.back() + 1;
    fwd_pos_ = positions(fwd_, span, "fwd_order");
    bwd_pos_ = positions(bwd_, span, "bwd_order");
  }

  static CommPlan identity(std::vector<NodeId> selected) {
    std::sort(selected.begin(), selected.end());
    return CommPlan(selected, selected, selected);
  }

  std::span<const NodeId> selected() const { return selected_; }
  std::span<const NodeId> fwd_order() const { return fwd_; }
  std::span<const NodeId> bwd_order() const { return bwd_; }
  std::span<const NodeId> order(Direction d) const {
    return d == Direction::kForward ? fwd_order() : bwd_order();
  }
  std::size_t size() const { return selected_.size(); }

  // 0-based slot of node `id` in the forward / backward sequence.
  std::size_t fwd_position(NodeId id) const { return lookup(fwd_pos_, id); }
  std::size_t bwd_position(NodeId id) const { return lookup(bwd_pos_, id); }

  bool contains(NodeId id) const { return std::binary_search(selected_.begin(), selected_.end(), id); }

  void check_against(const Instance& inst) const {
    if (selected_.back() >= inst.size()) {
      throw InputError("plan refers to node " + std::to_string(selected_.back()) +
                       " but instance has " + std::to_string(inst.size()) + " nodes");
    }
  }

  friend bool operator==(const CommPlan& a, const CommPlan& b) {
    return a.selected_ == b.selected_ && a.fwd_ == b.fwd_ && a.bwd_ == b.bwd_;
  }

 private:
  static constexpr std::size_t kAbsent = static_cast<std::size_t>(-1);

  std::vector<std::size_t> positions(std::span<const NodeId> order, std::size_t span,
                                     const char* name) const {
    if (order.size() != selected_.size()) {
      throw InputError(std::string(name) + " is not a permutation of the selected nodes");
    }
    std::vector<std::size_t> pos(span, kAbsent);
    for (std::size_t p = 0; p < order.size(); ++p) {
      const NodeId id = order[p];
      if (id >= span || !contains(id) || pos[id] != kAbsent) {
        throw InputError(std::string(name) + " is not a permutation of the selected nodes");
      }
      pos[id] = p;
    }
    return pos;
  }

  static std::size_t lookup(const std::vector<std::size_t>& pos, NodeId id) {
    if (id >= pos.size() || pos[id] == kAbsent) {
      throw InputError("node " + std::to_string(id) + " is not in the plan");
    }
    return pos[id];
  }

  std::vector<NodeId> selected_;
  std::vector<NodeId> fwd_;
  std::vector<NodeId> bwd_;
  std::vector<std::size_t> fwd_pos_;
  std::vector<std::size_t> bwd_pos_;
};

// ---------------------------------------------------------------------------
// Generation

// U/D = uniform/diverse; first letter pair is communication ("M"), second computation ("C").
enum class Profile { kUMUC, kUMDC, kDMUC, kDMDC };

inline std::string_view to_string(Profile p) {
  switch (p) {
    case Profile::kUMUC: return "UMUC";
    case Profile::kUMDC: return "UMDC";
    case Profile::kDMUC: return "DMUC";
    case Profile::kDMDC: return "DMDC";
  }
  return "?";
}

inline Profile parse_profile(std::string_view s) {
  std::string up(s);
  std::transform(up.begin(), up.end(), up.begin(), [](unsigned char c) { return std::toupper(c); });
  if (up == "UMUC") return Profile::kUMUC;
  if (up == "UMDC") return Profile::kUMDC;
  if (up == "DMUC") return Profile::kDMUC;
  if (up == "DMDC") return Profile::kDMDC;
  throw InputError("unknown profile '" + std::string(s) + "'");
}

inline bool diverse_delays(Profile p) { return p == Profile::kDMUC || p == Profile::kDMDC; }
inline bool diverse_rates(Profile p) { return p == Profile::kUMDC || p == Profile::kDMDC; }

inline constexpr double kDiverseLow = 0.5;
inline constexpr double kDiverseHigh = 5.0;
inline constexpr double kDefaultWorkload = 10.0;

// Uniform in [0,1) from the top 53 bits; avoids the implementation-defined
// std::uniform_real_distribution so instances are identical across toolchains.
inline double unit_draw(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Every node consumes exactly two draws (rate, delay), so generate(n) is a
// prefix of generate(m) for n <= m, and profiles sharing a seed share draws.
// A node's single communication delay is used for both directions.
inline Instance generate_instance(std::size_t n, std::uint64_t seed, Profile profile,
                                  double workload = kDefaultWorkload) {
  if (n == 0) throw InputError("generate_instance: n must be >= 1");
  std::mt19937_64 rng(seed);
  std::vector<NodeSpec> nodes(n);
  for (NodeId i = 0; i < n; ++i) {
    const double ru = unit_draw(rng);
    const double du = unit_draw(rng);
    const double delay = diverse_delays(profile) ? kDiverseLow + (kDiverseHigh - kDiverseLow) * du : 1.0;
    nodes[i] = NodeSpec{i, diverse_rates(profile) ? kDiverseLow + (kDiverseHigh - kDiverseLow) * ru : 1.0,
                        delay, delay};
  }
  return Instance(workload, std::move(nodes));
}

// ---------------------------------------------------------------------------
// JSON I/O

namespace detail {

inline double required_number(const nlohmann::json& obj, const char* field, const std::string& where) {
  auto it = obj.find(field);
  if (it == obj.end()) throw InputError(where + "missing field '" + field + "'");
  if (!it->is_number()) throw InputError(where + "field '" + field + "' must be a number");
  return it->get<double>();
}

}  // namespace detail

inline Instance instance_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw InputError("instance document must be a JSON object");
  const double workload = detail::required_number(doc, "workload", "");
  auto nodes_it = doc.find("nodes");
  if (nodes_it == doc.end()) throw InputError("missing field 'nodes'");
  if (!nodes_it->is_array()) throw InputError("field 'nodes' must be an array");

  std::vector<NodeSpec> nodes;
  nodes.reserve(nodes_it->size());
  for (std::size_t i = 0; i < nodes_it->size(); ++i) {
    const nlohmann::json& jn = (*nodes_it)[i];
    const std::string where = "node " + std::to_string(i) + ": ";
    if (!jn.is_object()) throw InputError(where + "must be an object");
    NodeSpec n;
    n.id = i;
    if (auto id = jn.find("id"); id != jn.end()) {
      if (!id->is_number_integer() || id->get<long long>() != static_cast<long long>(i)) {
        throw InputError(where + "field 'id' must equal the array index " + std::to_string(i));
      }
    }
    n.rate = detail::required_number(jn, "rate", where);
    n.fwd_delay = detail::required_number(jn, "fwd_delay", where);
    n.bwd_delay = detail::required_number(jn, "bwd_delay", where);
    nodes.push_back(n);
  }
  return Instance(workload, std::move(nodes));
}

inline Instance parse_instance(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("syntax error: ") + e.what());
  }
  return instance_from_json(doc);
}

inline Instance parse_instance(std::istream& in) {
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_instance(text);
}

// Numbers are written with 17 significant digits so parse(render(x)) == x bit-for-bit.
inline std::string render_instance(const Instance& inst) {
  std::ostringstream os;
  os << "{\"workload\": " << format_double(inst.workload()) << ", \"nodes\": [";
  for (const NodeSpec& n : inst.nodes()) {
    if (n.id != 0) os << ",";
    os << "\n  {\"rate\": " << format_double(n.rate) << ", \"fwd_delay\": " << format_double(n.fwd_delay)
       << ", \"bwd_delay\": " << format_double(n.bwd_delay) << "}";
  }
  os << "\n]}\n";
  return os.str();
}

}  // namespace decsched
