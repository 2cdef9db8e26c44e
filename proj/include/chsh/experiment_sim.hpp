#pragma once

// Monte-Carlo runs of the four-step protocol and the CHSH estimators.
//
// One run: two fair coins pick (a, b); an outcome (p, q) is drawn from the
// setting-conditioned law of the chosen source. Each run consumes exactly one
// 64-bit word for the coins (top bit -> a, next bit -> b) and one for the
// outcome, so a single stream yields prefix-consistent tallies.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "chsh/angles.hpp"
#include "chsh/classical_model.hpp"
#include "chsh/errors.hpp"
#include "chsh/quantum_model.hpp"
#include "chsh/random.hpp"

namespace chsh {

enum class SamplingSource { kQuantumExact, kBellMeasure };

inline std::string to_string(SamplingSource s) {
  return s == SamplingSource::kQuantumExact ? "quantum-exact" : "bell-measure";
}

inline SamplingSource parse_sampling_source(const std::string& text) {
  if (text == "quantum-exact") return SamplingSource::kQuantumExact;
  if (text == "bell-measure") return SamplingSource::kBellMeasure;
  throw InputError("unknown sampling source '" + text +
                   "' (expected quantum-exact or bell-measure)");
}

struct ExperimentConfig {
  Angles angles = kAspectAngles;
  std::uint64_t runs = 1;
  std::uint64_t seed = 0;
  SamplingSource source = SamplingSource::kQuantumExact;

  void validate() const {
    angles.validate();
    if (runs < 1) throw InputError("ExperimentConfig: runs must be >= 1");
  }
};

struct RunRecord {
  double a;
  double b;
  int p;
  int q;
};

/// Counts N(a,b)(p,q) in setting order x kJointOutcomes order.
class TallyTable {
 public:
  explicit TallyTable(const Angles& angles) : angles_(angles) {}

  const Angles& angles() const { return angles_; }

  void record(std::size_t setting, std::size_t cell) { ++counts_[setting][cell]; }

  std::uint64_t count(std::size_t setting, std::size_t cell) const {
    return counts_.at(setting).at(cell);
  }

  std::uint64_t setting_count(std::size_t setting) const {
    std::uint64_t n = 0;
    for (auto c : counts_.at(setting)) n += c;
    return n;
  }

  std::uint64_t total() const {
    std::uint64_t k = 0;
    for (std::size_t s = 0; s < kSettingCount; ++s) k += setting_count(s);
    return k;
  }

  /// Cell-wise addition; both tables must share angles.
  TallyTable& merge(const TallyTable& other) {
    if (!(other.angles_ == angles_)) {
      throw InputError("TallyTable::merge: tables use different angles");
    }
    for (std::size_t s = 0; s < kSettingCount; ++s) {
      for (std::size_t c = 0; c < 4; ++c) counts_[s][c] += other.counts_[s][c];
    }
    return *this;
  }

  /// Setting index of (a, b); throws if the pair is not configured.
  std::size_t setting_of(SettingPair s) const {
    for (std::size_t k = 0; k < kSettingCount; ++k) {
      if (angles_.setting(k) == s) return k;
    }
    throw InputError("TallyTable: setting (" + std::to_string(s.a) + ", " +
                     std::to_string(s.b) + ") is not configured");
  }

  friend bool operator==(const TallyTable&, const TallyTable&) = default;

 private:
  Angles angles_;
  std::array<std::array<std::uint64_t, 4>, kSettingCount> counts_{};
};

/// Setting-conditioned outcome laws, stored as cumulative thresholds.
class OutcomeSampler {
 public:
  OutcomeSampler(const Angles& angles, SamplingSource source) {
    angles.validate();
    const auto measure =
        source == SamplingSource::kBellMeasure
            ? std::optional<BellMeasure>(bell_measure(angles))
            : std::nullopt;
    for (std::size_t k = 0; k < kSettingCount; ++k) {
      const auto n = measure ? measure->block(k)
                             : closed_form_distribution(angles.setting(k));
      double acc = 0.0;
      for (std::size_t c = 0; c < 3; ++c) {
        acc += n[c];
        cumulative_[k][c] = acc;
      }
    }
  }

  std::size_t draw(std::size_t setting, double u) const {
    const auto& cum = cumulative_[setting];
    if (u < cum[0]) return 0;
    if (u < cum[1]) return 1;
    if (u < cum[2]) return 2;
    return 3;
  }

 private:
  std::array<std::array<double, 3>, kSettingCount> cumulative_{};
};

/// Produces runs from one random stream.
class ExperimentRunner {
 public:
  ExperimentRunner(const ExperimentConfig& cfg, std::uint64_t stream_index = 0)
      : angles_(cfg.angles),
        sampler_(cfg.angles, cfg.source),
        rng_(cfg.seed, StreamDomain::kExperiment, stream_index) {}

  /// Advances one run and returns (setting, cell).
  std::pair<std::size_t, std::size_t> step() {
    const std::uint64_t coins = rng_.next_u64();
    const std::size_t ia = coins >> 63;
    const std::size_t ib = (coins >> 62) & 1u;
    const std::size_t setting = setting_index(ia, ib);
    return {setting, sampler_.draw(setting, rng_.uniform())};
  }

  RunRecord next() {
    const auto [setting, cell] = step();
    const auto s = angles_.setting(setting);
    return {s.a, s.b, kJointOutcomes[cell].p, kJointOutcomes[cell].q};
  }

  void run_into(TallyTable& tally, std::uint64_t runs) {
    for (std::uint64_t i = 0; i < runs; ++i) {
      const auto [setting, cell] = step();
      tally.record(setting, cell);
    }
  }

 private:
  Angles angles_;
  OutcomeSampler sampler_;
  RandomStream rng_;
};

/// Single-stream run; bit-reproducible for a given config.
inline TallyTable run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  TallyTable tally(cfg.angles);
  ExperimentRunner(cfg).run_into(tally, cfg.runs);
  return tally;
}

/// Splits the runs into `threads` contiguous chunks on streams 1..threads and
/// merges the tallies. Reproducible for a fixed thread count, but only
/// distributionally equivalent to run_experiment.
inline TallyTable run_experiment_parallel(const ExperimentConfig& cfg,
                                          unsigned threads) {
  cfg.validate();
  threads = std::max(1u, threads);
  std::vector<TallyTable> parts(threads, TallyTable(cfg.angles));
  std::vector<std::thread> pool;
  const std::uint64_t base = cfg.runs / threads;
  const std::uint64_t extra = cfg.runs % threads;
  for (unsigned i = 0; i < threads; ++i) {
    const std::uint64_t n = base + (i < extra ? 1 : 0);
    pool.emplace_back([&cfg, &parts, i, n] {
      ExperimentRunner(cfg, 1 + i).run_into(parts[i], n);
    });
  }
  for (auto& th : pool) th.join();
  TallyTable total(cfg.angles);
  for (const auto& p : parts) total.merge(p);
  return total;
}

/// (N(1,1) - N(1,-1) - N(-1,1) + N(-1,-1)) / N for setting k.
inline double estimate_E(const TallyTable& t, std::size_t setting) {
  const auto n = t.setting_count(setting);
  if (n == 0) {
    const auto s = t.angles().setting(setting);
    std::ostringstream msg;
    msg << "estimate_E: no runs recorded for setting " << setting << " (a=" << s.a
        << ", b=" << s.b << ")";
    throw EmptyCellError(msg.str(), static_cast<int>(setting));
  }
  const double signed_sum = static_cast<double>(t.count(setting, 0)) -
                            static_cast<double>(t.count(setting, 1)) -
                            static_cast<double>(t.count(setting, 2)) +
                            static_cast<double>(t.count(setting, 3));
  return signed_sum / static_cast<double>(n);
}

inline double estimate_E(const TallyTable& t, SettingPair s) {
  return estimate_E(t, t.setting_of(s));
}

/// Standard error of E for setting k: sqrt((1 - E^2) / N), the empirical
/// variance of the +-1 product pq over N runs.
inline double estimate_E_stderr(const TallyTable& t, std::size_t setting) {
  const double e = estimate_E(t, setting);
  const double n = static_cast<double>(t.setting_count(setting));
  return std::sqrt(std::max(0.0, 1.0 - e * e) / n);
}

struct ChshEstimate {
  std::array<double, kSettingCount> e{};
  std::array<double, kSettingCount> e_stderr{};
  double s = 0.0;
  /// Root-sum-square of the four per-setting standard errors.
  double s_stderr = 0.0;
  std::uint64_t k = 0;
};

inline ChshEstimate estimate_S(const TallyTable& t) {
  ChshEstimate est;
  double var = 0.0;
  for (std::size_t k = 0; k < kSettingCount; ++k) {
    est.e[k] = estimate_E(t, k);
    est.e_stderr[k] = estimate_E_stderr(t, k);
    var += est.e_stderr[k] * est.e_stderr[k];
  }
  est.s = chsh_combination(est.e);
  est.s_stderr = std::sqrt(var);
  est.k = t.total();
  return est;
}

struct SweepPoint {
  std::uint64_t k = 0;
  TallyTable tally;
  std::array<std::optional<double>, kSettingCount> e{};
  std::optional<ChshEstimate> estimate;  // absent when any setting is empty
  std::vector<std::size_t> empty_settings;
};

/// One growing single-stream run, snapshotted at each checkpoint.
inline std::vector<SweepPoint> convergence_sweep(
    const ExperimentConfig& cfg, const std::vector<std::uint64_t>& checkpoints) {
  cfg.validate();
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] < 1 || (i > 0 && checkpoints[i] <= checkpoints[i - 1])) {
      throw InputError("convergence_sweep: checkpoints must be positive and increasing");
    }
  }
  ExperimentRunner runner(cfg);
  TallyTable tally(cfg.angles);
  std::vector<SweepPoint> out;
  std::uint64_t done = 0;
  for (auto k : checkpoints) {
    runner.run_into(tally, k - done);
    done = k;
    SweepPoint pt{k, tally, {}, std::nullopt, {}};
    for (std::size_t s = 0; s < kSettingCount; ++s) {
      if (tally.setting_count(s) == 0) {
        pt.empty_settings.push_back(s);
      } else {
        pt.e[s] = estimate_E(tally, s);
      }
    }
    if (pt.empty_settings.empty()) pt.estimate = estimate_S(tally);
    out.push_back(std::move(pt));
  }
  return out;
}

struct ChiSquare {
  double statistic = 0.0;
  std::size_t dof = 0;
};

/// Pearson homogeneity test of two tallies over the 16 (setting, outcome)
/// cells. Cells empty in both tables are dropped from the degrees of freedom.
inline ChiSquare chi_square_homogeneity(const TallyTable& x, const TallyTable& y) {
  const double nx = static_cast<double>(x.total());
  const double ny = static_cast<double>(y.total());
  if (nx == 0 || ny == 0) throw InputError("chi_square_homogeneity: empty tally");
  ChiSquare out;
  std::size_t used = 0;
  for (std::size_t s = 0; s < kSettingCount; ++s) {
    for (std::size_t c = 0; c < 4; ++c) {
      const double ox = static_cast<double>(x.count(s, c));
      const double oy = static_cast<double>(y.count(s, c));
      const double col = ox + oy;
      if (col == 0) continue;
      ++used;
      const double ex = col * nx / (nx + ny);
      const double ey = col * ny / (nx + ny);
      out.statistic += (ox - ex) * (ox - ex) / ex + (oy - ey) * (oy - ey) / ey;
    }
  }
  out.dof = used > 0 ? used - 1 : 0;
  return out;
}

inline nlohmann::ordered_json to_json(const TallyTable& t) {
  nlohmann::ordered_json j;
  const auto& a = t.angles();
  j["angles"] = {{"a1", a.a1}, {"a2", a.a2}, {"b1", a.b1}, {"b2", a.b2}};
  j["k"] = t.total();
  auto settings = nlohmann::ordered_json::array();
  for (std::size_t s = 0; s < kSettingCount; ++s) {
    const auto sp = a.setting(s);
    nlohmann::ordered_json row;
    row["a"] = sp.a;
    row["b"] = sp.b;
    row["n"] = t.setting_count(s);
    row["counts"] = {t.count(s, 0), t.count(s, 1), t.count(s, 2), t.count(s, 3)};
    settings.push_back(row);
  }
  j["outcome_order"] = "(+1,+1),(+1,-1),(-1,+1),(-1,-1)";
  j["settings"] = settings;
  return j;
}

/// CSV with columns a, b, p, q, count; one row per (setting, outcome).
inline std::string to_csv(const TallyTable& t) {
  std::ostringstream out;
  out.precision(17);
  out << "a,b,p,q,count\n";
  for (std::size_t s = 0; s < kSettingCount; ++s) {
    const auto sp = t.angles().setting(s);
    for (std::size_t c = 0; c < 4; ++c) {
      out << sp.a << ',' << sp.b << ',' << kJointOutcomes[c].p << ','
          << kJointOutcomes[c].q << ',' << t.count(s, c) << '\n';
    }
  }
  return out.str();
}

}  // namespace chsh
