#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

namespace decsched {

inline constexpr double kRelTol = 1e-9;
inline constexpr double kAbsTol = 1e-12;

inline double tolerance(double a, double b) {
  return std::max(kAbsTol, kRelTol * std::max(std::abs(a), std::abs(b)));
}

inline bool approx_eq(double a, double b) { return std::abs(a - b) <= tolerance(a, b); }

// a >= b up to tolerance
inline bool approx_ge(double a, double b) { return a >= b - tolerance(a, b); }

inline bool approx_le(double a, double b) { return approx_ge(b, a); }

// Shortest-safe decimal text: 17 significant digits round-trips every double.
inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace decsched
