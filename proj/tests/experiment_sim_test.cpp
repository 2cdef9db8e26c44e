#include <algorithm>
#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "chsh/experiment_sim.hpp"

namespace chsh {
namespace {

constexpr double kTsirelson = 2 * std::numbers::sqrt2;

ExperimentConfig aspect(std::uint64_t runs, std::uint64_t seed,
                        SamplingSource source = SamplingSource::kQuantumExact) {
  return {kAspectAngles, runs, seed, source};
}

TallyTable tally_with(std::size_t setting, std::array<std::uint64_t, 4> counts) {
  TallyTable t(kAspectAngles);
  for (std::size_t c = 0; c < 4; ++c) {
    for (std::uint64_t i = 0; i < counts[c]; ++i) t.record(setting, c);
  }
  return t;
}

void expect_conservation(const TallyTable& t, std::uint64_t k) {
  std::uint64_t total = 0;
  for (std::size_t s = 0; s < kSettingCount; ++s) {
    std::uint64_t cells = 0;
    for (std::size_t c = 0; c < 4; ++c) cells += t.count(s, c);
    EXPECT_EQ(cells, t.setting_count(s));
    total += t.setting_count(s);
  }
  EXPECT_EQ(total, k);
  EXPECT_EQ(t.total(), k);
}

TEST(RunExperiment, SettingOccupancyIsUniform) {
  const std::uint64_t k = 4'000'000;
  const auto t = run_experiment(aspect(k, 101));
  expect_conservation(t, k);
  for (std::size_t s = 0; s < kSettingCount; ++s) {
    const double share = static_cast<double>(t.setting_count(s)) / k;
    EXPECT_NEAR(share, 0.25, 0.01);
    // Binomial(k, 1/4): 5 standard deviations.
    EXPECT_NEAR(share, 0.25, 5 * std::sqrt(0.25 * 0.75 / k));
  }
}

TEST(RunExperiment, SingleRunFillsOneCell) {
  const auto t = run_experiment({{0.1, 0.2, 0.3, 0.4}, 1, 5, SamplingSource::kQuantumExact});
  int nonzero = 0;
  for (std::size_t s = 0; s < kSettingCount; ++s) {
    for (std::size_t c = 0; c < 4; ++c) nonzero += t.count(s, c) != 0;
  }
  EXPECT_EQ(nonzero, 1);
}

TEST(RunExperiment, Deterministic) {
  EXPECT_EQ(run_experiment(aspect(50'000, 7)), run_experiment(aspect(50'000, 7)));
  EXPECT_FALSE(run_experiment(aspect(50'000, 7)) == run_experiment(aspect(50'000, 8)));
}

TEST(RunExperiment, RejectsZeroRuns) {
  EXPECT_THROW(run_experiment(aspect(0, 1)), InputError);
}

TEST(RunExperiment, RunnerRecordsAreValid) {
  ExperimentRunner runner(aspect(1, 3));
  for (int i = 0; i < 1000; ++i) {
    const auto r = runner.next();
    EXPECT_TRUE(r.a == kAspectAngles.a1 || r.a == kAspectAngles.a2);
    EXPECT_TRUE(r.b == kAspectAngles.b1 || r.b == kAspectAngles.b2);
    EXPECT_TRUE(r.p == 1 || r.p == -1);
    EXPECT_TRUE(r.q == 1 || r.q == -1);
  }
}

TEST(EstimateE, CountExamples) {
  EXPECT_EQ(estimate_E(tally_with(0, {10, 0, 0, 10}), 0), 1.0);
  EXPECT_EQ(estimate_E(tally_with(0, {5, 5, 5, 5}), 0), 0.0);
  // Rounded 1000 * 2 * n(p,q) at a - b = pi/8: 853.55 -> 853, 146.45 -> 147.
  const auto t = tally_with(0, {853, 147, 147, 853});
  EXPECT_NEAR(estimate_E(t, SettingPair{0.0, std::numbers::pi / 8}), 0.706, 1e-15);
  EXPECT_NEAR(estimate_E(t, 0), std::cos(std::numbers::pi / 4), 0.002);
}

TEST(EstimateE, EmptySettingNamesIt) {
  const auto t = tally_with(0, {1, 0, 0, 0});
  try {
    estimate_E(t, 2);
    FAIL() << "expected EmptyCellError";
  } catch (const EmptyCellError& e) {
    EXPECT_EQ(e.setting_index(), 2);
    EXPECT_NE(std::string(e.what()).find("setting 2"), std::string::npos);
  }
  EXPECT_THROW(estimate_S(t), EmptyCellError);
  EXPECT_THROW(estimate_E(t, SettingPair{9.0, 9.0}), InputError);
}

TEST(EstimateS, UniformTallyIsZero) {
  TallyTable t(kAspectAngles);
  for (std::size_t s = 0; s < kSettingCount; ++s) {
    for (std::size_t c = 0; c < 4; ++c) t.record(s, c);
  }
  const auto est = estimate_S(t);
  EXPECT_EQ(est.s, 0.0);
  EXPECT_EQ(est.k, 16u);
}

TEST(EstimateS, ExactCountsGiveTsirelsonValue) {
  // Counts proportional to the exact law, built at growing scale.
  double previous = 10.0;
  for (std::uint64_t scale : {100ull, 10'000ull, 1'000'000ull}) {
    TallyTable t(kAspectAngles);
    for (std::size_t s = 0; s < kSettingCount; ++s) {
      const auto n = closed_form_distribution(kAspectAngles.setting(s));
      for (std::size_t c = 0; c < 4; ++c) {
        const auto count = static_cast<std::uint64_t>(std::llround(n[c] * scale));
        for (std::uint64_t i = 0; i < count; ++i) t.record(s, c);
      }
    }
    const double err = std::abs(estimate_S(t).s - kTsirelson);
    EXPECT_LE(err, previous);
    previous = err;
  }
  EXPECT_LT(previous, 1e-5);
}

TEST(EstimateS, MillionRunsWithinFourSigma) {
  const auto est = estimate_S(run_experiment(aspect(1'000'000, 2025)));
  EXPECT_LT(std::abs(est.s - kTsirelson), 4 * est.s_stderr);
  EXPECT_LT(std::abs(est.s - kTsirelson), 0.02);
  for (double e : est.e) EXPECT_LE(std::abs(e), 1.0);
  EXPECT_LE(std::abs(est.s), 4.0);
}

// Over 100 seeds, E_k misses cos 2(a-b) by more than 5 standard errors in
// fewer than 1% of them; the per-block frequency of eps_A = +1 stays within
// 5 binomial standard deviations of 1/2; setting occupancy stays within 5
// standard deviations of k/4.
TEST(EstimatorConsistency, HundredSeeds) {
  const std::uint64_t k = 1'000'000;
  int seeds_with_outlier = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto t = run_experiment(aspect(k, 1000 + seed));
    bool outlier = false;
    for (std::size_t s = 0; s < kSettingCount; ++s) {
      const auto sp = kAspectAngles.setting(s);
      const double exact = std::cos(2 * (sp.a - sp.b));
      const double n = static_cast<double>(t.setting_count(s));
      const double sd = std::sqrt((1 - exact * exact) / n);
      if (std::abs(estimate_E(t, s) - exact) > 5 * sd) outlier = true;

      const double plus_a = static_cast<double>(t.count(s, 0) + t.count(s, 1));
      EXPECT_LT(std::abs(plus_a / n - 0.5), 5 * std::sqrt(0.25 / n));
      EXPECT_LT(std::abs(n - k / 4.0), 5 * std::sqrt(k * 0.25 * 0.75));
    }
    seeds_with_outlier += outlier;
  }
  EXPECT_LT(seeds_with_outlier, 1);
}

TEST(Sources, BellMeasureAndQuantumAgree) {
  const auto q = run_experiment(aspect(1'000'000, 1, SamplingSource::kQuantumExact));
  const auto b = run_experiment(aspect(1'000'000, 2, SamplingSource::kBellMeasure));
  const auto chi = chi_square_homogeneity(q, b);
  EXPECT_EQ(chi.dof, 15u);
  // 0.999 quantile of chi-square with 15 degrees of freedom.
  EXPECT_LT(chi.statistic, 37.69729821835383);
  // Same stream, same law: the draws coincide.
  const auto b_same = run_experiment(aspect(1'000'000, 1, SamplingSource::kBellMeasure));
  EXPECT_EQ(q, b_same);
}

TEST(Sources, ChiSquareDetectsDifferentLaws) {
  const auto x = run_experiment(aspect(200'000, 1));
  const auto y =
      run_experiment({{0.0, std::numbers::pi / 4, 0.0, 3 * std::numbers::pi / 8}, 200'000, 2,
                      SamplingSource::kQuantumExact});
  // Angles differ, so rebuild y's counts on x's angles for the comparison.
  TallyTable relabeled(kAspectAngles);
  for (std::size_t s = 0; s < kSettingCount; ++s) {
    for (std::size_t c = 0; c < 4; ++c) {
      for (std::uint64_t i = 0; i < y.count(s, c); ++i) relabeled.record(s, c);
    }
  }
  EXPECT_GT(chi_square_homogeneity(x, relabeled).statistic, 1000.0);
  EXPECT_EQ(parse_sampling_source("bell-measure"), SamplingSource::kBellMeasure);
  EXPECT_THROW(parse_sampling_source("coin"), InputError);
}

TEST(Parallel, MergesAndConserves) {
  const auto cfg = aspect(1'000'003, 11);
  const auto t = run_experiment_parallel(cfg, 4);
  expect_conservation(t, cfg.runs);
  EXPECT_EQ(t, run_experiment_parallel(cfg, 4));
  const auto est = estimate_S(t);
  EXPECT_LT(std::abs(est.s - kTsirelson), 5 * est.s_stderr);
}

TEST(Parallel, MergeIsCellwiseAddition) {
  auto x = tally_with(0, {1, 2, 3, 4});
  const auto y = tally_with(3, {4, 3, 2, 1});
  x.merge(y);
  EXPECT_EQ(x.count(0, 3), 4u);
  EXPECT_EQ(x.count(3, 0), 4u);
  EXPECT_EQ(x.total(), 20u);
  TallyTable other(Angles{0, 0, 0, 1});
  EXPECT_THROW(x.merge(other), InputError);
}

TEST(Sweep, PrefixPropertyAndGaps) {
  const auto cfg = aspect(1, 42);
  const std::vector<std::uint64_t> checkpoints{1, 1'000, 10'000, 100'000, 1'000'000};
  const auto sweep = convergence_sweep(cfg, checkpoints);
  ASSERT_EQ(sweep.size(), checkpoints.size());
  EXPECT_EQ(sweep[0].empty_settings.size(), 3u);
  EXPECT_FALSE(sweep[0].estimate.has_value());
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    auto prefix = cfg;
    prefix.runs = checkpoints[i];
    EXPECT_EQ(sweep[i].tally, run_experiment(prefix));
  }
  ASSERT_TRUE(sweep.back().estimate.has_value());
  EXPECT_LT(std::abs(sweep.back().estimate->s - kTsirelson), 0.02);
  EXPECT_LT(std::abs(sweep.back().estimate->s - kTsirelson),
            std::abs(sweep[1].estimate->s - kTsirelson) + 4 * sweep[1].estimate->s_stderr);

  const auto again = convergence_sweep(cfg, checkpoints);
  for (std::size_t i = 0; i < sweep.size(); ++i) EXPECT_EQ(again[i].tally, sweep[i].tally);
  EXPECT_THROW(convergence_sweep(cfg, {10, 5}), InputError);
}

TEST(Serialization, CsvColumnsAndJson) {
  const auto t = run_experiment(aspect(1000, 1));
  const auto csv = to_csv(t);
  EXPECT_EQ(csv.rfind("a,b,p,q,count\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 17);
  const auto j = to_json(t);
  EXPECT_EQ(j["k"].get<std::uint64_t>(), 1000u);
  std::uint64_t sum = 0;
  for (const auto& row : j["settings"]) sum += row["n"].get<std::uint64_t>();
  EXPECT_EQ(sum, 1000u);
}

}  // namespace
}  // namespace chsh
