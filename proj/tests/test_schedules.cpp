#include <gtest/gtest.h>

#include <cmath>

#include "generators.hpp"
#include "saddlekit/restart.hpp"
#include "saddlekit/schedules.hpp"

using namespace saddlekit;
using namespace saddlekit::testing;

namespace {

ProblemConstants random_constants(std::mt19937_64& rng, double mu_lo = 0.0) {
  ProblemConstants k;
  k.mu = mu_lo > 0 ? log_uniform(rng, mu_lo, 1.0) : 0.0;
  k.L = std::max(k.mu, log_uniform(rng, 1e-2, 1e2));
  k.L_xx = uniform_index(rng, 0, 1) ? log_uniform(rng, 1e-2, 1e2) : 0.0;
  k.L_yx = log_uniform(rng, 1e-2, 1e2);
  k.L_yy = uniform_index(rng, 0, 1) ? log_uniform(rng, 1e-2, 1e2) : 0.0;
  return k;
}

NoiseLevels random_noise(std::mt19937_64& rng) {
  return {log_uniform(rng, 1e-3, 10), log_uniform(rng, 1e-3, 10), log_uniform(rng, 1e-3, 10)};
}

}  // namespace

// ---------------------------------------------------------------------------
// Expected-gap bound
// ---------------------------------------------------------------------------

TEST(BoundBE, AllZeroConstantsGiveZero) {
  EXPECT_EQ(theoretical_bound_BE({}, {}, 1.0, 1.0, 1.0, 1.0, 10).B_E, 0.0);
}

TEST(BoundBE, SmoothnessTerm) {
  ProblemConstants k;
  k.L = 1;
  // 16 L Omega_X / (T (T - 1)) at T = 10.
  EXPECT_DOUBLE_EQ(theoretical_bound_BE(k, {}, 1.0, 1.0, 1.0, 1.0, 10).B_E, 16.0 / 90.0);
}

TEST(BoundBE, DualNoiseTerm) {
  // 8 sigma_y / sqrt(T) (1/rho + 16 rho Omega_Y) = 0.8 (4 + 4).
  const auto r = theoretical_bound_BE({}, {0.0, 0.0, 1.0}, 1.0, 1.0, 0.25, 1.0, 100);
  EXPECT_NEAR(r.B_E, 6.4, 1e-12);
  EXPECT_NEAR(r.terms.noise_y_term, 6.4, 1e-12);
}

TEST(BoundBE, ZeroConstantKillsInfiniteDiameter) {
  ProblemConstants k;
  k.L_yx = 1;
  const auto r = theoretical_bound_BE(k, {}, 1.0, kInf, 1.0, 1.0, 10);
  EXPECT_EQ(r.B_E, kInf);
  k.L_yx = 0;
  k.L = 1;
  EXPECT_TRUE(std::isfinite(theoretical_bound_BE(k, {}, 1.0, kInf, 1.0, 1.0, 10).B_E));
}

TEST(BoundBE, RejectsShortHorizonAndBadWeights) {
  EXPECT_THROW(theoretical_bound_BE({}, {}, 1.0, 1.0, 1.0, 1.0, 2), ConfigError);
  EXPECT_THROW(theoretical_bound_BE({}, {}, 1.0, 1.0, 0.0, 1.0, 10), ConfigError);
  EXPECT_THROW(theoretical_bound_BE({}, {}, 1.0, 1.0, 1.0, -1.0, 10), ConfigError);
}

TEST(BoundBE, TotalIsSumOfTermsAndNonincreasing) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 200; ++i) {
    const auto k = random_constants(rng);
    const auto s = random_noise(rng);
    const double ox = log_uniform(rng, 1e-2, 10), oy = log_uniform(rng, 1e-2, 10);
    const double rho = default_rho(oy), rho_p = default_rho_prime(ox);
    double prev = kInf;
    for (long T = 3; T < 100000; T = T * 3 / 2 + 1) {
      const auto r = theoretical_bound_BE(k, s, ox, oy, rho, rho_p, T);
      EXPECT_NEAR(r.B_E, r.terms.total(), 1e-12 * r.B_E);
      EXPECT_LE(r.B_E, prev);
      prev = r.B_E;
    }
  }
}

TEST(HighProbability, ValidatesFailureProbability) {
  EXPECT_THROW(high_probability_excess({1, 1, 1}, {1, 1}, 1, 1, 0.0, 10), ConfigError);
  EXPECT_THROW(high_probability_excess({1, 1, 1}, {1, 1}, 1, 1, 0.5, 10), ConfigError);
  EXPECT_EQ(high_probability_excess({}, {1, 1}, 1, 1, 0.1, 10), 0.0);
  EXPECT_GT(high_probability_excess({0, 0, 1}, {1, 1}, 1, 1, 0.1, 10), 0.0);
}

// ---------------------------------------------------------------------------
// Default schedule and condition checks
// ---------------------------------------------------------------------------

TEST(DefaultSchedule, InitialValues) {
  const auto s = default_schedule({}, {}, 1.0, 1.0);
  EXPECT_EQ(s.theta(1), 0.0);
  EXPECT_EQ(s.beta(1), 1.0);
  EXPECT_EQ(s.gamma(7), 7.0);
  EXPECT_DOUBLE_EQ(s.theta(4), 0.75);
  EXPECT_EQ(s.provenance, ScheduleProvenance::Default);
}

TEST(DefaultSchedule, UnitConstantsPassAllConditions) {
  ProblemConstants k{1, 1, 1, 1, 0};
  const auto rep = verify_schedule(default_schedule(k, {}, 1.0, 1.0), k, 100000);
  EXPECT_TRUE(rep.ok);
  EXPECT_EQ(rep.checked_up_to, 100000);
}

TEST(DefaultSchedule, RandomConstantsPassAllConditions) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 100; ++i) {
    const auto k = random_constants(rng);
    const auto s = random_noise(rng);
    const auto rep = verify_schedule(default_schedule(k, s, log_uniform(rng, 0.01, 10), log_uniform(rng, 0.01, 10)),
                                     k, 2000);
    EXPECT_TRUE(rep.ok) << "condition " << (rep.first_violation ? rep.first_violation->condition : 0);
  }
}

TEST(CustomSchedule, LargeAlphaViolatesDualStepBound) {
  ProblemConstants k;
  k.L_yy = 1;
  auto s = default_schedule(k, {}, 1.0, 1.0);
  s.alpha = [](long) { return 1.0; };
  s.provenance = ScheduleProvenance::Custom;
  const auto rep = verify_schedule(s, k, 10);
  ASSERT_FALSE(rep.ok);
  EXPECT_EQ(rep.first_violation->t, 1);
  EXPECT_EQ(rep.first_violation->condition, 6);
  EXPECT_DOUBLE_EQ(rep.first_violation->rhs, 0.5);
}

TEST(CustomSchedule, DecreasingThetaViolatesMonotonicity) {
  auto s = default_schedule({}, {}, 1.0, 1.0);
  s.theta = [](long t) { return t == 3 ? 0.1 : static_cast<double>(t - 1) / static_cast<double>(t); };
  const auto rep = verify_schedule(s, {}, 10);
  ASSERT_FALSE(rep.ok);
  EXPECT_EQ(rep.first_violation->t, 3);
  EXPECT_EQ(rep.first_violation->condition, 1);
}

TEST(CustomSchedule, LargeTauViolatesPrimalStepBound) {
  ProblemConstants k;
  k.L = 1;
  auto s = default_schedule(k, {}, 1.0, 1.0);
  s.tau = [](long t) { return static_cast<double>(t); };
  const auto rep = verify_schedule(s, k, 10);
  ASSERT_FALSE(rep.ok);
  EXPECT_EQ(rep.first_violation->condition, 7);
}

TEST(ConditionNames, CoverEveryCondition) {
  for (int c = 1; c <= 8; ++c) EXPECT_NE(condition_name(c), "unknown");
  EXPECT_EQ(condition_name(9), "unknown");
}

// ---------------------------------------------------------------------------
// Rescaled schedules
// ---------------------------------------------------------------------------

TEST(RescaledSchedule, DefaultEtaAndConstantSteps) {
  ProblemConstants k{4, 0, 1, 0.5, 1};
  const auto s = rescaled_schedule_det(k, 0.5, 2.0, 3.0, 50);
  EXPECT_DOUBLE_EQ(s.eta, (4.0 / 3.0) * std::sqrt(2.0 / 0.5));
  EXPECT_EQ(s.horizon, 50);
  EXPECT_EQ(s.alpha(1), s.alpha(50));
  EXPECT_DOUBLE_EQ(s.tau(10), 10 * s.tau(1));
  EXPECT_EQ(s.provenance, ScheduleProvenance::RescaledDeterministic);
  EXPECT_EQ(rescaled_schedule_det(k, 0.5, 2.0, 3.0, 50, 0.7).eta, 0.7);
  EXPECT_THROW(rescaled_schedule_det(k, 0.5, kInf, 3.0, 50), ConfigError);
  EXPECT_THROW(rescaled_schedule_det(k, 0.5, 2.0, 3.0, 2), ConfigError);
}

TEST(RescaledSchedule, BoundsAtHorizonMeetQuarterContraction) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const auto k = random_constants(rng, 1e-2);
    const double op = log_uniform(rng, 0.1, 2), oy = log_uniform(rng, 0.1, 5), R = log_uniform(rng, 0.1, 10);
    const long Td = rescaled_horizon_det(k, op, oy, R);
    EXPECT_LE(rescaled_bound_det(k, op, oy, R, Td).B_det, k.mu * R * R / 16.0 * (1 + 1e-12));
    const auto s = random_noise(rng);
    const double vs = log_uniform(rng, 1e-4, 0.1);
    const long Ts = rescaled_horizon_stoc(k, s, op, oy, R, vs);
    EXPECT_GE(Ts, 3);
    EXPECT_LE(rescaled_bound_det(k, op, oy, R, Ts).B_det + rescaled_bound_var(s, op, oy, R, Ts, vs),
              k.mu * R * R / 16.0 * (1 + 1e-12));
  }
}

TEST(RescaledSchedule, PassesConditionsUpToHorizon) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 100; ++i) {
    const auto k = random_constants(rng, 1e-2);
    const double op = log_uniform(rng, 0.1, 2), oy = log_uniform(rng, 0.1, 5), R = log_uniform(rng, 0.1, 10);
    const long T = std::min<long>(rescaled_horizon_det(k, op, oy, R), 5000);
    EXPECT_TRUE(verify_schedule(rescaled_schedule_det(k, op, oy, R, T), k, T).ok);
    const auto s = random_noise(rng);
    EXPECT_TRUE(verify_schedule(rescaled_schedule_stoc(k, s, op, oy, R, T, 0.01), k, T).ok);
  }
}

// ---------------------------------------------------------------------------
// Restart plans
// ---------------------------------------------------------------------------

TEST(RestartPlan, StageCountAndRadii) {
  ProblemConstants k;
  k.mu = 1;
  k.L = 1;
  const auto plan = plan_restart(k, {}, 0.5, 1.0, 2.0, 0.25);
  ASSERT_EQ(plan.K, 3);
  EXPECT_DOUBLE_EQ(plan.R[0], 4.0);
  EXPECT_DOUBLE_EQ(plan.R[1], 2.0 * std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(plan.R[2], 2.0);
  EXPECT_FALSE(plan.stochastic);
  long total = 0;
  for (int i = 0; i < plan.K; ++i) {
    EXPECT_EQ(plan.T[i], rescaled_horizon_det(k, 0.5, 1.0, plan.R[i]));
    total += plan.T[i];
  }
  EXPECT_EQ(plan.total_iterations(), total);
}

TEST(RestartPlan, StochasticFailureSplit) {
  ProblemConstants k;
  k.mu = 1;
  // mu U^2 / (4 eps) = 16 gives K = 5.
  const auto plan = plan_restart(k, {0.1, 0.1, 0.1}, 0.5, 1.0, 2.0, 1.0 / 16.0, 0.3);
  ASSERT_EQ(plan.K, 5);
  EXPECT_DOUBLE_EQ(plan.varsigma, 0.01);
  EXPECT_TRUE(plan.stochastic);
}

TEST(RestartPlan, RejectsInvalidInputs) {
  ProblemConstants k;
  k.mu = 1;
  EXPECT_THROW(plan_restart(k, {}, 0.5, 1.0, 2.0, 1.01), ConfigError);
  EXPECT_EQ(plan_restart(k, {}, 0.5, 1.0, 2.0, 1.0).K, 1);
  EXPECT_THROW(plan_restart(k, {}, 0.5, 1.0, 2.0, 0.1, 0.0), ConfigError);
  EXPECT_THROW(plan_restart(k, {}, 0.5, kInf, 2.0, 0.1), ConfigError);
  EXPECT_THROW(plan_restart({}, {}, 0.5, 1.0, 2.0, 0.1), ConfigError);
}

TEST(RestartPlan, TotalWithinClosedFormComplexity) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    const auto k = random_constants(rng, 0.1);
    const double op = log_uniform(rng, 0.1, 2), oy = log_uniform(rng, 0.1, 5), U = log_uniform(rng, 1, 10);
    const double eps = k.mu * U * U / 4.0 * log_uniform(rng, 1e-4, 1.0);
    const auto det = plan_restart(k, {}, op, oy, U, eps);
    EXPECT_LE(static_cast<double>(det.total_iterations()), restart_complexity_det(k, op, oy, U, eps));
    const NoiseLevels s{log_uniform(rng, 1e-4, 0.1), log_uniform(rng, 1e-4, 0.1), log_uniform(rng, 1e-4, 0.1)};
    const double nu = uniform(rng, 0.01, 1.0);
    const auto stoc = plan_restart(k, s, op, oy, U, eps, nu);
    EXPECT_LE(static_cast<double>(stoc.total_iterations()), restart_complexity_stoc(k, s, op, oy, U, eps, nu));
  }
}
