#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>

namespace madtasks {

// Round-half-up to an integer percent. The epsilon absorbs binary
// representation error so 0.5% is treated as exactly half.
inline long long percent_half_up(double fraction) {
  return static_cast<long long>(std::floor(fraction * 100.0 + 0.5 + 1e-9));
}

inline long long percent_half_up(std::uint64_t count, std::uint64_t population) {
  if (population == 0) return 0;
  return static_cast<long long>((200 * count + population) / (2 * population));
}

// Fixed-point with round-half-up on the decimal representation.
inline std::string fixed(double v, int decimals) {
  const double scale = std::pow(10.0, decimals);
  const double r = std::floor(std::fabs(v) * scale + 0.5 + 1e-9) / scale;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, std::signbit(v) && r != 0.0 ? -r : r);
  return buf;
}

// Six significant digits, shortest form ("%.6g").
inline std::string sig6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline double round_sig6(double v) { return std::strtod(sig6(v).c_str(), nullptr); }

}  // namespace madtasks
