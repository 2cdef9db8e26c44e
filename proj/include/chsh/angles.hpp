#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>

#include "chsh/errors.hpp"
#include "chsh/quantum_model.hpp"

namespace chsh {

/// Polariser angles (a1, a2, b1, b2) in radians.
struct Angles {
  double a1;
  double a2;
  double b1;
  double b2;

  friend bool operator==(const Angles&, const Angles&) = default;

  void validate() const {
    if (!std::isfinite(a1) || !std::isfinite(a2) || !std::isfinite(b1) ||
        !std::isfinite(b2)) {
      throw InputError("Angles: all four angles must be finite");
    }
  }

  double a(std::size_t i) const { return i == 0 ? a1 : a2; }
  double b(std::size_t j) const { return j == 0 ? b1 : b2; }

  /// Setting k in the order (a1,b1), (a1,b2), (a2,b1), (a2,b2).
  SettingPair setting(std::size_t k) const { return {a(k / 2), b(k % 2)}; }
};

/// a in {0, pi/4}, b in {pi/8, 3pi/8}.
inline constexpr Angles kAspectAngles{0.0, std::numbers::pi / 4,
                                      std::numbers::pi / 8,
                                      3 * std::numbers::pi / 8};

inline constexpr std::size_t kSettingCount = 4;

/// CHSH sign of setting k: E(a1,b1) - E(a1,b2) + E(a2,b1) + E(a2,b2).
inline constexpr std::array<int, kSettingCount> kChshSigns{1, -1, 1, 1};

inline constexpr std::size_t setting_index(std::size_t ia, std::size_t ib) {
  return 2 * ia + ib;
}

/// S from per-setting correlators in setting order.
inline double chsh_combination(const std::array<double, kSettingCount>& e) {
  double s = 0.0;
  for (std::size_t k = 0; k < kSettingCount; ++k) s += kChshSigns[k] * e[k];
  return s;
}

/// cos 2(a1-b1) - cos 2(a1-b2) + cos 2(a2-b1) + cos 2(a2-b2).
inline double chsh_closed_form(const Angles& angles) {
  std::array<double, kSettingCount> e{};
  for (std::size_t k = 0; k < kSettingCount; ++k) {
    const auto s = angles.setting(k);
    e[k] = std::cos(2 * (s.a - s.b));
  }
  return chsh_combination(e);
}

}  // namespace chsh
