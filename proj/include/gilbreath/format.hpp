#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace gilbreath {

/// Renders x with exactly `digits` significant figures, keeping trailing zeros.
inline std::string format_sig(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%#.*g", digits, x);
  std::string s(buf);
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

inline double round_sig(double x, int digits) {
  if (x == 0 || !std::isfinite(x)) return x;
  return std::stod(format_sig(x, digits));
}

}  // namespace gilbreath
