#pragma once

// Local hidden-variable models and the CHSH bound |S| <= 2.
//
// A LocalModel is a finite mixture over labels lambda with setting-independent
// weights (freedom) and a joint law defined as the product of one-sided
// responses (Bell locality). Both assumptions are therefore structural: the
// type is exactly the hypothesis class of the CHSH inequality.
//
// The CHSH functional is linear in the mixture weights and multilinear in the
// response probabilities, so its extremes over LocalModels are attained at
// deterministic strategies; optimization only needs the 16 of them.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "chsh/angles.hpp"
#include "chsh/classical_model.hpp"
#include "chsh/errors.hpp"
#include "chsh/random.hpp"

namespace chsh {

/// Fixed outcomes f(a_i) and g(b_j), each in {-1,+1}.
struct DeterministicStrategy {
  std::array<int, 2> f;
  std::array<int, 2> g;

  friend bool operator==(const DeterministicStrategy&,
                         const DeterministicStrategy&) = default;
};

/// All 16 strategies; bit 3..0 of the index encode f(a1), f(a2), g(b1), g(b2)
/// with a set bit meaning -1.
inline std::vector<DeterministicStrategy> enumerate_deterministic_strategies() {
  std::vector<DeterministicStrategy> out;
  out.reserve(16);
  auto sign = [](unsigned bits, unsigned k) { return (bits >> k) & 1u ? -1 : 1; };
  for (unsigned bits = 0; bits < 16; ++bits) {
    out.push_back({{sign(bits, 3), sign(bits, 2)}, {sign(bits, 1), sign(bits, 0)}});
  }
  return out;
}

/// f1 g1 - f1 g2 + f2 g1 + f2 g2. Always +2 or -2.
inline int chsh_functional(const DeterministicStrategy& s) {
  return s.f[0] * s.g[0] - s.f[0] * s.g[1] + s.f[1] * s.g[0] + s.f[1] * s.g[1];
}

class LocalModel {
 public:
  /// Per lambda: P(eps_A = +1 | gamma_A = a_i) for i = 0, 1.
  using Response = std::array<double, 2>;

  LocalModel(std::vector<double> weights, std::vector<Response> response_a,
             std::vector<Response> response_b)
      : weights_(std::move(weights)),
        response_a_(std::move(response_a)),
        response_b_(std::move(response_b)) {
    if (weights_.empty()) throw InputError("LocalModel: empty lambda support");
    if (response_a_.size() != weights_.size() ||
        response_b_.size() != weights_.size()) {
      throw InputError("LocalModel: one response pair per lambda required");
    }
    double total = 0.0;
    for (double w : weights_) {
      if (!std::isfinite(w) || w < 0.0) {
        throw InputError("LocalModel: weights must be finite and non-negative");
      }
      total += w;
    }
    if (std::abs(total - 1.0) > kTolerance) {
      throw InputError("LocalModel: weights must sum to 1");
    }
    auto check = [](const std::vector<Response>& rs) {
      for (const auto& r : rs) {
        for (double x : r) {
          if (!(x >= 0.0 && x <= 1.0)) {
            throw InputError("LocalModel: response probabilities must lie in [0, 1]");
          }
        }
      }
    };
    check(response_a_);
    check(response_b_);
  }

  /// Degenerate mixture concentrated on one deterministic strategy.
  static LocalModel from_strategy(const DeterministicStrategy& s) {
    auto prob = [](int v) { return v == 1 ? 1.0 : 0.0; };
    return LocalModel({1.0}, {{prob(s.f[0]), prob(s.f[1])}},
                      {{prob(s.g[0]), prob(s.g[1])}});
  }

  std::size_t support_size() const { return weights_.size(); }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<Response>& response_a() const { return response_a_; }
  const std::vector<Response>& response_b() const { return response_b_; }

  /// sum_lambda w * E[eps_A | a_i, lambda] * E[eps_B | b_j, lambda].
  double correlator(std::size_t ia, std::size_t ib) const {
    double e = 0.0;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      e += weights_[l] * (2.0 * response_a_[l][ia] - 1.0) *
           (2.0 * response_b_[l][ib] - 1.0);
    }
    return e;
  }

  /// Setting-conditioned outcome law, the lambda-mixture of product laws.
  OutcomeDistribution joint(std::size_t ia, std::size_t ib) const {
    OutcomeDistribution n{};
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      const double pa = response_a_[l][ia];
      const double pb = response_b_[l][ib];
      n[0] += weights_[l] * pa * pb;
      n[1] += weights_[l] * pa * (1.0 - pb);
      n[2] += weights_[l] * (1.0 - pa) * pb;
      n[3] += weights_[l] * (1.0 - pa) * (1.0 - pb);
    }
    return n;
  }

  /// Mixture t * lhs + (1 - t) * rhs over the concatenated lambda support.
  static LocalModel mix(const LocalModel& lhs, const LocalModel& rhs, double t) {
    if (!(t >= 0.0 && t <= 1.0)) throw InputError("LocalModel::mix: t outside [0, 1]");
    std::vector<double> w;
    std::vector<Response> ra;
    std::vector<Response> rb;
    for (std::size_t l = 0; l < lhs.support_size(); ++l) {
      w.push_back(t * lhs.weights_[l]);
      ra.push_back(lhs.response_a_[l]);
      rb.push_back(lhs.response_b_[l]);
    }
    for (std::size_t l = 0; l < rhs.support_size(); ++l) {
      w.push_back((1.0 - t) * rhs.weights_[l]);
      ra.push_back(rhs.response_a_[l]);
      rb.push_back(rhs.response_b_[l]);
    }
    return LocalModel(std::move(w), std::move(ra), std::move(rb));
  }

 private:
  std::vector<double> weights_;
  std::vector<Response> response_a_;
  std::vector<Response> response_b_;
};

inline double local_model_chsh(const LocalModel& m) {
  std::array<double, kSettingCount> e{};
  for (std::size_t k = 0; k < kSettingCount; ++k) e[k] = m.correlator(k / 2, k % 2);
  return chsh_combination(e);
}

/// Largest gap between the model's conditional outcome laws and the target's.
inline double max_distance(const LocalModel& m, const BellMeasure& target) {
  double worst = 0.0;
  for (std::size_t k = 0; k < kSettingCount; ++k) {
    const auto lhs = m.joint(k / 2, k % 2);
    const auto rhs = target.block(k);
    for (std::size_t c = 0; c < 4; ++c) {
      worst = std::max(worst, std::abs(lhs[c] - rhs[c]));
    }
  }
  return worst;
}

/// Random model with 1..8 labels. A quarter of the responses are pinned to 0
/// and a quarter to 1 so that the probe also visits faces of the polytope.
inline LocalModel random_local_model(RandomStream& rng) {
  const std::size_t support = 1 + rng.below(8);
  std::vector<double> w(support);
  double total = 0.0;
  for (auto& x : w) {
    x = -std::log1p(-rng.uniform());  // Exp(1): normalized, a flat Dirichlet
    total += x;
  }
  if (total <= 0.0) {
    std::fill(w.begin(), w.end(), 1.0);
    total = static_cast<double>(support);
  }
  for (auto& x : w) x /= total;
  auto response = [&rng] {
    const double u = rng.uniform();
    if (u < 0.25) return 0.0;
    if (u < 0.5) return 1.0;
    return rng.uniform();
  };
  std::vector<LocalModel::Response> ra(support);
  std::vector<LocalModel::Response> rb(support);
  for (std::size_t l = 0; l < support; ++l) {
    ra[l] = {response(), response()};
    rb[l] = {response(), response()};
  }
  return LocalModel(std::move(w), std::move(ra), std::move(rb));
}

struct BoundProbeReport {
  std::size_t models_checked = 0;
  std::size_t random_models = 0;
  double max_abs_s = 0.0;
  bool bound_respected = true;
  std::optional<LocalModel> witness;
  std::optional<double> min_distance_to_target;
};

/// Falsification probe of |S| <= 2: the 16 deterministic extremes, then
/// `trials` random models. Model t draws from its own stream, so the result
/// does not depend on `threads`.
inline BoundProbeReport verify_chsh_bound(
    std::size_t trials, std::uint64_t seed, unsigned threads = 1,
    const std::optional<BellMeasure>& target = std::nullopt) {
  if (trials < 1) throw InputError("verify_chsh_bound: trials must be >= 1");
  threads = std::max(1u, threads);

  struct Partial {
    double max_abs_s = -1.0;
    std::size_t witness_index = 0;
    double min_distance = std::numeric_limits<double>::infinity();
  };

  auto model_at = [seed](std::size_t t) {
    RandomStream rng(seed, StreamDomain::kLhvProbe, t);
    return random_local_model(rng);
  };

  auto scan = [&](std::size_t begin, std::size_t step, Partial& out) {
    for (std::size_t t = begin; t < trials; t += step) {
      const auto m = model_at(t);
      const double s = std::abs(local_model_chsh(m));
      if (s > out.max_abs_s) {
        out.max_abs_s = s;
        out.witness_index = t;
      }
      if (target) out.min_distance = std::min(out.min_distance, max_distance(m, *target));
    }
  };

  std::vector<Partial> partials(threads);
  if (threads == 1) {
    scan(0, 1, partials[0]);
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i) {
      pool.emplace_back(scan, i, threads, std::ref(partials[i]));
    }
    for (auto& th : pool) th.join();
  }

  BoundProbeReport report;
  report.random_models = trials;
  report.models_checked = trials + 16;
  Partial best;
  for (const auto& p : partials) {
    if (p.max_abs_s > best.max_abs_s ||
        (p.max_abs_s == best.max_abs_s && p.witness_index < best.witness_index)) {
      best.max_abs_s = p.max_abs_s;
      best.witness_index = p.witness_index;
    }
    best.min_distance = std::min(best.min_distance, p.min_distance);
  }
  report.max_abs_s = best.max_abs_s;
  report.witness = model_at(best.witness_index);

  for (const auto& strat : enumerate_deterministic_strategies()) {
    const auto m = LocalModel::from_strategy(strat);
    const double s = std::abs(local_model_chsh(m));
    if (s > report.max_abs_s) {
      report.max_abs_s = s;
      report.witness = m;
    }
    if (target) best.min_distance = std::min(best.min_distance, max_distance(m, *target));
  }
  if (target) report.min_distance_to_target = best.min_distance;
  report.bound_respected = report.max_abs_s <= 2.0 + kTolerance;
  return report;
}

struct LocalApproximation {
  DeterministicStrategy strategy;
  LocalModel model;
  double achieved_s;
  double target_s;
};

/// Best local model for the CHSH functional. The objective does not depend on
/// the target's angles; the target only supplies the quantum value to compare
/// against. Ties go to the first strategy in enumeration order.
inline LocalApproximation best_local_approximation(const BellMeasure& target) {
  const auto strategies = enumerate_deterministic_strategies();
  auto best = strategies.front();
  for (const auto& s : strategies) {
    if (chsh_functional(s) > chsh_functional(best)) best = s;
  }
  auto model = LocalModel::from_strategy(best);
  const double achieved = local_model_chsh(model);
  return {best, std::move(model), achieved, chsh_value_exact(target)};
}

inline nlohmann::ordered_json to_json(const DeterministicStrategy& s) {
  return {{"f", s.f}, {"g", s.g}};
}

inline nlohmann::ordered_json to_json(const LocalModel& m) {
  nlohmann::ordered_json j;
  j["weights"] = m.weights();
  j["response_a"] = m.response_a();
  j["response_b"] = m.response_b();
  return j;
}

}  // namespace chsh
