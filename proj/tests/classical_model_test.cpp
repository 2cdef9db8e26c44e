#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "chsh/classical_model.hpp"
#include "test_support.hpp"

namespace chsh {
namespace {

using testing::Gen;
constexpr double kPi = std::numbers::pi;
const Angles kAspect = kAspectAngles;

Angles random_angles(Gen& gen) {
  return {gen.angle(), gen.angle(), gen.angle(), gen.angle()};
}

// Brute-force oracle: sum the weights of all 16 points satisfying `pred`.
template <class Pred>
double sum_where(const BellMeasure& m, Pred pred) {
  double total = 0.0;
  for (std::size_t i = 0; i < BellMeasure::kPoints; ++i) {
    const auto pt = BellMeasure::point(i);
    if (pred(pt)) total += m.weight(i);
  }
  return total;
}

TEST(BellMeasure, AspectWeights) {
  const auto m = bell_measure(kAspect);
  // 1/4 * 1/2 cos^2(pi/8), evaluated independently.
  EXPECT_NEAR(m.weight(BellMeasure::point_index(0, joint_index(1, 1))), 0.10669417382415922,
              1e-15);
  double block = 0.0;
  for (std::size_t c = 0; c < 4; ++c) block += m.weight(BellMeasure::point_index(0, c));
  EXPECT_NEAR(block, 0.25, 1e-15);
  EXPECT_TRUE(m.warnings().empty());
}

TEST(BellMeasure, EqualSettingHasNoAnticorrelation) {
  const auto m = bell_measure({0.3, 1.0, 0.3, 2.0});
  EXPECT_NEAR(m.weight(BellMeasure::point_index(0, joint_index(1, -1))), 0.0, 1e-15);
}

TEST(BellMeasure, InvariantsForRandomAngles) {
  Gen gen(41);
  for (int i = 0; i < 1000; ++i) {
    const auto ang = random_angles(gen);
    const auto m = bell_measure(ang);
    double total = 0.0;
    for (double w : m.weights()) {
      EXPECT_GE(w, 0.0);
      total += w;
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
    for (std::size_t k = 0; k < kSettingCount; ++k) {
      const auto s = ang.setting(k);
      const double c = std::cos(s.a - s.b), sn = std::sin(s.a - s.b);
      EXPECT_NEAR(m.weight(BellMeasure::point_index(k, 0)), 0.125 * c * c, 1e-12);
      EXPECT_NEAR(m.weight(BellMeasure::point_index(k, 1)), 0.125 * sn * sn, 1e-12);
    }
  }
}

TEST(BellMeasure, MatchesQuantumBlocks) {
  Gen gen(42);
  const auto psi = bell_state();
  for (int i = 0; i < 200; ++i) {
    const auto ang = random_angles(gen);
    const auto m = bell_measure(ang);
    for (std::size_t k = 0; k < kSettingCount; ++k) {
      const auto born = born_distribution(joint_pvm(ang.setting(k)), psi);
      const auto block = m.block(k);
      for (std::size_t c = 0; c < 4; ++c) EXPECT_NEAR(block[c], born[c], 1e-12);
    }
  }
}

TEST(BellMeasure, DegenerateAnglesWarn) {
  const auto m = bell_measure({0.1, 0.1, 0.2, 0.3});
  ASSERT_EQ(m.warnings().size(), 1u);
  EXPECT_NE(m.warnings()[0].find("a1 == a2"), std::string::npos);
}

TEST(BellMeasure, RejectsBadInput) {
  EXPECT_THROW(bell_measure({NAN, 0, 0, 0}), InputError);
  std::array<double, 16> w{};
  w.fill(1.0 / 16);
  EXPECT_NO_THROW(BellMeasure::from_weights(kAspect, w));
  w[0] += 0.01;
  w[1] -= 0.02;
  w[4] += 0.01;
  EXPECT_THROW(BellMeasure::from_weights(kAspect, w), InputError);  // block totals off
  w.fill(1.0 / 16);
  w[0] = -w[0];
  EXPECT_THROW(BellMeasure::from_weights(kAspect, w), InputError);
}

TEST(BellMeasure, JsonRoundTrip) {
  const auto m = bell_measure(kAspect);
  const auto j = to_json(m);
  EXPECT_EQ(j["weights"].size(), 16u);
  const auto back = bell_measure_from_json(j);
  EXPECT_EQ(back.weights(), m.weights());
  EXPECT_EQ(back.angles(), m.angles());
  EXPECT_THROW(bell_measure_from_json(nlohmann::ordered_json{{"angles", 1}}), InputError);
}

TEST(Conditional, CorrelatedOutcomeGivenFarSide) {
  const auto m = bell_measure(kAspect);
  for (std::size_t k = 0; k < kSettingCount; ++k) {
    const auto s = kAspect.setting(k);
    const double p = conditional_probability(
        m, {{.eps_a = 1}, {.eps_b = 1, .gamma_a = s.a, .gamma_b = s.b}});
    EXPECT_NEAR(p, std::pow(std::cos(s.a - s.b), 2), 1e-12);
  }
}

TEST(Conditional, OneSidedIsHalf) {
  const auto m = bell_measure(kAspect);
  for (double a : {kAspect.a1, kAspect.a2}) {
    EXPECT_NEAR(conditional_probability(m, {{.eps_a = 1}, {.gamma_a = a}}), 0.5, 1e-12);
  }
  for (double b : {kAspect.b1, kAspect.b2}) {
    const double got = conditional_probability(m, {{.eps_b = -1}, {.gamma_b = b}});
    const double oracle =
        sum_where(m, [&](const BellPoint& pt) { return pt.q == -1 && kAspect.b(pt.ib) == b; }) /
        sum_where(m, [&](const BellPoint& pt) { return kAspect.b(pt.ib) == b; });
    EXPECT_NEAR(got, oracle, 1e-15);
    EXPECT_NEAR(got, 0.5, 1e-12);
  }
}

TEST(Conditional, Errors) {
  // Anti-correlated cells carry zero weight when a == b.
  const auto m = bell_measure({0.0, 1.0, 0.0, 2.0});
  EXPECT_THROW(conditional_probability(
                   m, {{}, {.eps_a = 1, .eps_b = -1, .gamma_a = 0.0, .gamma_b = 0.0}}),
               DomainError);
  EXPECT_THROW(conditional_probability(m, {{.eps_a = 1}, {.eps_a = 1}}), InputError);
  EXPECT_THROW(conditional_probability(m, {{.eps_a = 0}, {}}), InputError);
  EXPECT_THROW(conditional_probability(m, {{.eps_a = 1}, {.gamma_a = 0.5}}), InputError);
}

TEST(Marginals, UniformAndFarSettingInvariant) {
  const auto m = bell_measure(kAspect);
  const auto ma1 = marginal_A(m, 0.0, kPi / 8);
  const auto ma2 = marginal_A(m, 0.0, 3 * kPi / 8);
  const auto mb = marginal_B(m, kPi / 4, kPi / 8);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_NEAR(ma1[i], 0.5, 1e-12);
    EXPECT_NEAR(ma2[i], ma1[i], 1e-12);
    EXPECT_NEAR(mb[i], 0.5, 1e-12);
  }
  EXPECT_THROW(marginal_A(m, 0.3, kPi / 8), InputError);
  EXPECT_THROW(marginal_B(m, 0.0, 0.3), InputError);
}

TEST(Marginals, InvariantForRandomAngles) {
  Gen gen(43);
  for (int i = 0; i < 500; ++i) {
    const auto ang = random_angles(gen);
    const auto m = bell_measure(ang);
    for (std::size_t j = 0; j < 2; ++j) {
      const auto a0 = marginal_A(m, ang.a(j), ang.b1);
      const auto a1 = marginal_A(m, ang.a(j), ang.b2);
      const auto b0 = marginal_B(m, ang.a1, ang.b(j));
      const auto b1 = marginal_B(m, ang.a2, ang.b(j));
      for (std::size_t k = 0; k < 2; ++k) {
        EXPECT_NEAR(a0[k], a1[k], 1e-12);
        EXPECT_NEAR(b0[k], b1[k], 1e-12);
      }
    }
  }
}

TEST(FactorizationCheck, AspectViolates) {
  const auto r = check_A3_factorization(bell_measure(kAspect));
  EXPECT_FALSE(r.holds);
  // |1/2 cos^2(pi/8) - 1/4| = sqrt(2)/8, evaluated independently.
  EXPECT_NEAR(r.worst_deviation, 0.17677669529663687, 1e-12);
  EXPECT_GE(r.worst_deviation, 0.1);
}

TEST(FactorizationCheck, QuarterPiDifferencesFactorize) {
  // Every a - b is an odd multiple of pi/4, so cos^2(a - b) = 1/2.
  const auto r = check_A3_factorization(bell_measure({0.0, kPi / 2, kPi / 4, 3 * kPi / 4}));
  EXPECT_TRUE(r.holds);
  EXPECT_LT(r.worst_deviation, 1e-12);
}

TEST(FactorizationCheck, UniformBlocksFactorize) {
  std::array<double, 16> w{};
  w.fill(1.0 / 16);
  EXPECT_TRUE(check_A3_factorization(BellMeasure::from_weights(kAspect, w)).holds);
}

TEST(ChshExact, KnownConfigurations) {
  EXPECT_NEAR(chsh_value_exact(bell_measure(kAspect)), 2 * std::numbers::sqrt2, 1e-12);
  EXPECT_NEAR(chsh_value_exact(bell_measure({0.7, 0.7, 0.7, 0.7})), 2.0, 1e-12);
  EXPECT_NEAR(chsh_value_exact(bell_measure({0.0, kPi / 2, kPi / 4, 3 * kPi / 4})), 0.0, 1e-12);
}

TEST(ChshExact, AgreesWithClosedFormAndStaysUnderTsirelson) {
  Gen gen(44);
  double best = 0.0;
  for (int i = 0; i < 5000; ++i) {
    const auto ang = random_angles(gen);
    const double s = chsh_value_exact(bell_measure(ang));
    EXPECT_NEAR(s, chsh_closed_form(ang), 1e-12);
    EXPECT_LE(std::abs(s), 2 * std::numbers::sqrt2 + 1e-9);
    best = std::max(best, std::abs(s));
  }
  EXPECT_GT(best, 2.0);  // random search does find violations
}

TEST(CorrectedPrediction, Values) {
  const double s = 2 * std::numbers::sqrt2;
  const double v = corrected_prediction(s, 0.984, 0.971);
  EXPECT_NEAR(v, 2.702460294318494, 1e-12);
  EXPECT_NEAR(v, 2.70, 0.005);
  EXPECT_GE(v, 2.697 - 0.015);
  EXPECT_LE(v, 2.697 + 0.015);
  EXPECT_DOUBLE_EQ(corrected_prediction(1.234, 1.0, 1.0), 1.234);
  EXPECT_THROW(corrected_prediction(s, 0.0, 0.9), InputError);
  EXPECT_THROW(corrected_prediction(s, 0.9, 1.1), InputError);
  EXPECT_THROW(corrected_prediction(NAN, 0.9, 0.9), InputError);
}

}  // namespace
}  // namespace chsh
