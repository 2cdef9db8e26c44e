#pragma once

// Classical probability space on {-1,1}^2 x {a1,a2} x {b1,b2}.
//
// The measure is the uniform mixture of the four setting-conditioned outcome
// laws. Everything here is exact finite summation over 16 points; this module
// serves as the oracle for the Monte-Carlo simulator.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "chsh/angles.hpp"
#include "chsh/errors.hpp"
#include "chsh/quantum_model.hpp"

namespace chsh {

/// One point (p, q, a, b) of the 16-point space, with settings by index.
struct BellPoint {
  int p;
  int q;
  std::size_t ia;
  std::size_t ib;
};

class BellMeasure {
 public:
  static constexpr std::size_t kPoints = 16;

  /// Point order: setting-major (see Angles::setting), then kJointOutcomes.
  static std::size_t point_index(std::size_t setting, std::size_t cell) {
    return 4 * setting + cell;
  }

  static BellPoint point(std::size_t index) {
    const std::size_t setting = index / 4;
    const auto& o = kJointOutcomes[index % 4];
    return {o.p, o.q, setting / 2, setting % 2};
  }

  /// Arbitrary weights over the 16 points. Each setting block must carry
  /// total weight 1/4 (settings are chosen by two fair coins).
  static BellMeasure from_weights(const Angles& angles,
                                  const std::array<double, kPoints>& weights) {
    angles.validate();
    double total = 0.0;
    for (double w : weights) {
      if (!std::isfinite(w) || w < 0.0) {
        throw InputError("BellMeasure: weights must be finite and non-negative");
      }
      total += w;
    }
    if (std::abs(total - 1.0) > kTolerance) {
      throw InputError("BellMeasure: weights must sum to 1");
    }
    for (std::size_t k = 0; k < kSettingCount; ++k) {
      double block = 0.0;
      for (std::size_t c = 0; c < 4; ++c) block += weights[point_index(k, c)];
      if (std::abs(block - 0.25) > kTolerance) {
        throw InputError("BellMeasure: setting block " + std::to_string(k) +
                         " must have total weight 1/4");
      }
    }
    return BellMeasure(angles, weights);
  }

  const Angles& angles() const { return angles_; }
  const std::array<double, kPoints>& weights() const { return weights_; }
  double weight(std::size_t index) const { return weights_.at(index); }
  const std::vector<std::string>& warnings() const { return warnings_; }

  /// Outcome law conditioned on setting k: 4 * block weights.
  OutcomeDistribution block(std::size_t setting) const {
    OutcomeDistribution n{};
    for (std::size_t c = 0; c < 4; ++c) {
      n[c] = 4.0 * weights_[point_index(setting, c)];
    }
    return n;
  }

 private:
  BellMeasure(const Angles& angles, const std::array<double, kPoints>& weights)
      : angles_(angles), weights_(weights) {
    if (angles.a1 == angles.a2) {
      warnings_.push_back("degenerate setting: a1 == a2");
    }
    if (angles.b1 == angles.b2) {
      warnings_.push_back("degenerate setting: b1 == b2");
    }
  }

  Angles angles_;
  std::array<double, kPoints> weights_;
  std::vector<std::string> warnings_;
};

/// The uniform mixture of the four quantum outcome laws.
inline BellMeasure bell_measure(const Angles& angles) {
  angles.validate();
  std::array<double, BellMeasure::kPoints> w{};
  for (std::size_t k = 0; k < kSettingCount; ++k) {
    const auto n = closed_form_distribution(angles.setting(k));
    for (std::size_t c = 0; c < 4; ++c) {
      w[BellMeasure::point_index(k, c)] = 0.25 * n[c];
    }
  }
  return BellMeasure::from_weights(angles, w);
}

/// Partial assignment to the coordinates (eps_A, eps_B, gamma_A, gamma_B).
/// Settings are matched by angle value, so with a1 == a2 the event
/// gamma_A == a1 covers both settings.
struct EventAssignment {
  std::optional<int> eps_a{};
  std::optional<int> eps_b{};
  std::optional<double> gamma_a{};
  std::optional<double> gamma_b{};

  bool contains(const BellPoint& pt, const Angles& angles) const {
    if (eps_a && *eps_a != pt.p) return false;
    if (eps_b && *eps_b != pt.q) return false;
    if (gamma_a && *gamma_a != angles.a(pt.ia)) return false;
    if (gamma_b && *gamma_b != angles.b(pt.ib)) return false;
    return true;
  }

  std::string describe() const {
    std::string out;
    auto append = [&out](const std::string& part) {
      if (!out.empty()) out += ", ";
      out += part;
    };
    if (eps_a) append("eps_A=" + std::to_string(*eps_a));
    if (eps_b) append("eps_B=" + std::to_string(*eps_b));
    if (gamma_a) append("gamma_A=" + std::to_string(*gamma_a));
    if (gamma_b) append("gamma_B=" + std::to_string(*gamma_b));
    return out.empty() ? "<everything>" : out;
  }
};

/// P(target | condition).
struct ConditionalQuery {
  EventAssignment target;
  EventAssignment condition;

  void validate(const Angles& angles) const {
    auto check_eps = [](const std::optional<int>& e) {
      if (e) require_outcome(*e, "ConditionalQuery");
    };
    check_eps(target.eps_a);
    check_eps(target.eps_b);
    check_eps(condition.eps_a);
    check_eps(condition.eps_b);
    auto check_a = [&angles](const std::optional<double>& g) {
      if (g && *g != angles.a1 && *g != angles.a2) {
        throw InputError("ConditionalQuery: gamma_A=" + std::to_string(*g) +
                         " is not a configured angle");
      }
    };
    auto check_b = [&angles](const std::optional<double>& g) {
      if (g && *g != angles.b1 && *g != angles.b2) {
        throw InputError("ConditionalQuery: gamma_B=" + std::to_string(*g) +
                         " is not a configured angle");
      }
    };
    check_a(target.gamma_a);
    check_a(condition.gamma_a);
    check_b(target.gamma_b);
    check_b(condition.gamma_b);
    if ((target.eps_a && condition.eps_a) ||
        (target.eps_b && condition.eps_b) ||
        (target.gamma_a && condition.gamma_a) ||
        (target.gamma_b && condition.gamma_b)) {
      throw InputError(
          "ConditionalQuery: target and condition must constrain disjoint "
          "variables");
    }
  }
};

inline double probability(const BellMeasure& m, const EventAssignment& ev) {
  double total = 0.0;
  for (std::size_t i = 0; i < BellMeasure::kPoints; ++i) {
    if (ev.contains(BellMeasure::point(i), m.angles())) total += m.weight(i);
  }
  return total;
}

inline double conditional_probability(const BellMeasure& m,
                                      const ConditionalQuery& query) {
  query.validate(m.angles());
  double joint = 0.0;
  double cond = 0.0;
  for (std::size_t i = 0; i < BellMeasure::kPoints; ++i) {
    const auto pt = BellMeasure::point(i);
    if (!query.condition.contains(pt, m.angles())) continue;
    cond += m.weight(i);
    if (query.target.contains(pt, m.angles())) joint += m.weight(i);
  }
  if (cond <= 0.0) {
    throw DomainError("conditional_probability: conditioning event {" +
                      query.condition.describe() + "} has probability zero");
  }
  return joint / cond;
}

namespace detail {

inline std::size_t require_configured(double value, double first,
                                      double second, const char* side) {
  if (value == first) return 0;
  if (value == second) return 1;
  throw InputError(std::string("marginal: ") + side + "=" +
                   std::to_string(value) + " is not a configured angle");
}

}  // namespace detail

/// P(eps_A = p | gamma_A = a, gamma_B = b) for p = +1, -1.
inline LocalDistribution marginal_A(const BellMeasure& m, double a, double b) {
  const auto& ang = m.angles();
  const auto ia = detail::require_configured(a, ang.a1, ang.a2, "gamma_A");
  const auto ib = detail::require_configured(b, ang.b1, ang.b2, "gamma_B");
  return marginal_over_q(m.block(setting_index(ia, ib)));
}

/// P(eps_B = q | gamma_A = a, gamma_B = b) for q = +1, -1.
inline LocalDistribution marginal_B(const BellMeasure& m, double a, double b) {
  const auto& ang = m.angles();
  const auto ia = detail::require_configured(a, ang.a1, ang.a2, "gamma_A");
  const auto ib = detail::require_configured(b, ang.b1, ang.b2, "gamma_B");
  return marginal_over_p(m.block(setting_index(ia, ib)));
}

struct FactorizationReport {
  bool holds = true;
  double worst_deviation = 0.0;
  std::size_t witness_setting = 0;
  JointOutcome witness_outcome{1, 1};
};

/// Compares P(p, q | a, b) with P(p | a) * P(q | b) in every cell.
///
/// This is the Bell-locality factorization with no hidden variable present:
/// each side's law may depend only on its own setting.
inline FactorizationReport check_A3_factorization(const BellMeasure& m,
                                                  double tol = kTolerance) {
  const auto& ang = m.angles();
  FactorizationReport report;
  for (std::size_t k = 0; k < kSettingCount; ++k) {
    const auto s = ang.setting(k);
    for (const auto& o : kJointOutcomes) {
      const double joint = conditional_probability(
          m, {{.eps_a = o.p, .eps_b = o.q}, {.gamma_a = s.a, .gamma_b = s.b}});
      const double pa = conditional_probability(
          m, {{.eps_a = o.p}, {.gamma_a = s.a}});
      const double pb = conditional_probability(
          m, {{.eps_b = o.q}, {.gamma_b = s.b}});
      const double dev = std::abs(joint - pa * pb);
      if (dev > report.worst_deviation) {
        report.worst_deviation = dev;
        report.witness_setting = k;
        report.witness_outcome = o;
      }
    }
  }
  report.holds = report.worst_deviation <= tol;
  return report;
}

/// Per-setting correlators E(a,b) = sum pq n(p,q) in setting order.
inline std::array<double, kSettingCount> correlators(const BellMeasure& m) {
  std::array<double, kSettingCount> e{};
  for (std::size_t k = 0; k < kSettingCount; ++k) e[k] = correlator(m.block(k));
  return e;
}

inline double chsh_value_exact(const BellMeasure& m) {
  return chsh_combination(correlators(m));
}

/// f * t * s, with detection factor f and transmission factor t in (0, 1].
inline double corrected_prediction(double s, double f, double t) {
  if (!std::isfinite(s)) throw InputError("corrected_prediction: s must be finite");
  if (!(f > 0.0 && f <= 1.0)) {
    throw InputError("corrected_prediction: F must lie in (0, 1]");
  }
  if (!(t > 0.0 && t <= 1.0)) {
    throw InputError("corrected_prediction: T must lie in (0, 1]");
  }
  return f * t * s;
}

/// Canonical JSON: angles then the 16 weights in point order.
inline nlohmann::ordered_json to_json(const BellMeasure& m) {
  nlohmann::ordered_json j;
  const auto& a = m.angles();
  j["angles"] = {{"a1", a.a1}, {"a2", a.a2}, {"b1", a.b1}, {"b2", a.b2}};
  j["point_order"] = "setting-major (a1,b1),(a1,b2),(a2,b1),(a2,b2); "
                     "outcomes (+1,+1),(+1,-1),(-1,+1),(-1,-1)";
  j["weights"] = m.weights();
  return j;
}

inline BellMeasure bell_measure_from_json(const nlohmann::ordered_json& j) {
  try {
    const auto& a = j.at("angles");
    const Angles angles{a.at("a1").get<double>(), a.at("a2").get<double>(),
                        a.at("b1").get<double>(), a.at("b2").get<double>()};
    const auto w = j.at("weights").get<std::array<double, BellMeasure::kPoints>>();
    return BellMeasure::from_weights(angles, w);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("bell_measure_from_json: ") + e.what());
  }
}

}  // namespace chsh
