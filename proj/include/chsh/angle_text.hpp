#pragma once

// Angle literals: raw radians ("0.3927") or multiples of pi ("pi", "-pi/4",
// "3pi/8", "3*pi/8", "0.5pi").

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "chsh/angles.hpp"
#include "chsh/errors.hpp"

namespace chsh {

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

/// Whole-string strtod; nullopt-like failure signalled through `ok`.
inline double parse_real(const std::string& s, bool& ok) {
  ok = false;
  if (s.empty()) return 0.0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  ok = end == s.c_str() + s.size() && std::isfinite(v);
  return v;
}

}  // namespace detail

inline double parse_angle(std::string_view text) {
  const std::string s = detail::trim(text);
  const auto fail = [&s]() -> double {
    throw InputError("invalid angle '" + s +
                     "' (expected radians or a multiple of pi such as 3pi/8)");
  };
  const auto pi_pos = s.find("pi");
  bool ok = false;
  if (pi_pos == std::string::npos) {
    const double v = detail::parse_real(s, ok);
    return ok ? v : fail();
  }

  std::string coef = s.substr(0, pi_pos);
  if (!coef.empty() && coef.back() == '*') coef.pop_back();
  double factor = 1.0;
  if (coef.empty() || coef == "+") {
    factor = 1.0;
  } else if (coef == "-") {
    factor = -1.0;
  } else {
    factor = detail::parse_real(coef, ok);
    if (!ok) return fail();
  }

  const std::string rest = s.substr(pi_pos + 2);
  double denom = 1.0;
  if (!rest.empty()) {
    if (rest.front() != '/') return fail();
    denom = detail::parse_real(rest.substr(1), ok);
    if (!ok || denom == 0.0) return fail();
  }
  return factor * std::numbers::pi / denom;
}

/// Shortest "n pi/d" form with d <= 64 when the angle is such a multiple
/// within 1e-12 rad, otherwise the radians with 17 significant digits.
inline std::string format_angle(double radians) {
  if (radians == 0.0) return "0";
  for (int d = 1; d <= 64; ++d) {
    const double n = radians / std::numbers::pi * d;
    const double rounded = std::round(n);
    if (rounded != 0.0 &&
        std::abs(rounded * std::numbers::pi / d - radians) <= 1e-12) {
      const long long num = static_cast<long long>(rounded);
      std::string out;
      if (num == -1) {
        out = "-pi";
      } else if (num == 1) {
        out = "pi";
      } else {
        out = std::to_string(num) + "pi";
      }
      if (d != 1) out += "/" + std::to_string(d);
      return out;
    }
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", radians);
  return buf;
}

/// Four comma-separated angles a1,a2,b1,b2.
inline Angles parse_angles(std::string_view text) {
  std::vector<double> values;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    values.push_back(parse_angle(text.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (values.size() != 4) {
    throw InputError("expected four angles a1,a2,b1,b2, got " +
                     std::to_string(values.size()));
  }
  return {values[0], values[1], values[2], values[3]};
}

inline std::string format_angles(const Angles& a) {
  return format_angle(a.a1) + "," + format_angle(a.a2) + "," +
         format_angle(a.b1) + "," + format_angle(a.b2);
}

}  // namespace chsh
