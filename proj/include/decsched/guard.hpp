#pragma once

#include <cstddef>
#include <cstdlib>
#include <string>

#include "decsched/error.hpp"

namespace decsched {

// Size limits for the brute-force enumerators.
struct Guard {
  std::size_t order_limit = 9;    // permutations of at most this many nodes
  std::size_t subset_limit = 12;  // subsets of at most this many nodes
  bool disabled = false;

  void check_order(std::size_t n) const {
    if (!disabled && n > order_limit) {
      throw GuardError("exhaustive ordering over " + std::to_string(n) + " nodes exceeds guard " +
                       std::to_string(order_limit) + " (use --guard-override or DECSCHED_GUARD)");
    }
  }
  void check_subsets(std::size_t n) const {
    if (!disabled && n > subset_limit) {
      throw GuardError("exhaustive selection over " + std::to_string(n) + " nodes exceeds guard " +
                       std::to_string(subset_limit) + " (use --guard-override or DECSCHED_GUARD)");
    }
  }

  // DECSCHED_GUARD=<n> sets both limits to n; DECSCHED_GUARD=off disables them.
  static Guard from_env() {
    Guard g;
    const char* v = std::getenv("DECSCHED_GUARD");
    if (v == nullptr || *v == '\0') return g;
    const std::string s(v);
    if (s == "off" || s == "none") {
      g.disabled = true;
      return g;
    }
    char* end = nullptr;
    const unsigned long long n = std::strtoull(v, &end, 10);
    if (end == v || *end != '\0') throw InputError("DECSCHED_GUARD must be an integer or 'off'");
    g.order_limit = g.subset_limit = static_cast<std::size_t>(n);
    return g;
  }
};

}  // namespace decsched
