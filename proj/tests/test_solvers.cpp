#include <gtest/gtest.h>

#include <cmath>

#include "generators.hpp"
#include "saddlekit/restart.hpp"
#include "saddlekit/spdhg.hpp"
#include "saddlekit/stopping.hpp"

using namespace saddlekit;
using namespace saddlekit::testing;

namespace {

ClosedFormInstance cheap_quadratic(std::uint64_t seed = 1) {
  QuadraticSaddleOptions q;
  q.dim_x = 3;
  q.dim_y = 2;
  q.mu = 1;
  q.L = 2;
  q.L_yx = 0.1;
  q.L_yy = 0;
  q.radius_x = 2;
  q.radius_y = 1;
  q.seed = seed;
  return make_quadratic_saddle(q);
}

ScheduleParams spdhg_schedule(const SaddleProblem& p, const NoiseLevels& s = {}) {
  return default_schedule(p.constants(), s, default_rho(p.geom_y().bregman_diameter),
                           default_rho_prime(p.geom_x().bregman_diameter));
}

}  // namespace

// ---------------------------------------------------------------------------
// Single step
// ---------------------------------------------------------------------------

TEST(Step, ZeroPayoffLeavesIteratesInPlace) {
  const auto p = make_matrix_game(Matrix::Zero(3, 2));
  StochasticOracle o(p, NoiseModel::deterministic());
  const Vector x1{{0.2, 0.3, 0.5}}, y1{{0.6, 0.4}};
  auto s = initial_state(p, x1, y1);
  const auto sched = spdhg_schedule(p);
  for (int i = 0; i < 5; ++i) spdhg_step(p, o, s, sched, PrimalProx::plain(p.geom_x()));
  EXPECT_LT((s.x - x1).norm(), 1e-15);
  EXPECT_LT((s.y - y1).norm(), 1e-15);
  EXPECT_LT((s.x_bar - x1).norm(), 1e-15);
  EXPECT_EQ(s.t, 6);
}

TEST(Step, ExactlyOneCallPerGradientKind) {
  const auto p = random_matrix_game(4, 3, 2);
  StochasticOracle o(p, NoiseModel::subgaussian(0.1, 0.1, 0.1, 3));
  auto s = initial_state(p, p.geom_x().set.center_point(), p.geom_y().set.center_point());
  const auto sched = spdhg_schedule(p, o.levels());
  for (long i = 1; i <= 10; ++i) {
    spdhg_step(p, o, s, sched, PrimalProx::plain(p.geom_x()));
    for (int k = 0; k < 3; ++k) EXPECT_EQ(o.stats().calls[k], i);
  }
}

TEST(Step, IteratesStayFeasible) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const auto p = trial % 2 ? random_matrix_game(5, 4, trial) : cheap_quadratic(trial);
    StochasticOracle o(p, NoiseModel::subgaussian(0.5, 0.5, 0.5, trial));
    auto s = initial_state(p, sample_point(p.geom_x().set, rng), sample_point(p.geom_y().set, rng));
    const auto sched = spdhg_schedule(p, o.levels());
    for (int i = 0; i < 200; ++i) {
      spdhg_step(p, o, s, sched, PrimalProx::plain(p.geom_x()));
      ASSERT_TRUE(p.geom_x().set.contains(s.x, 1e-9));
      ASSERT_TRUE(p.geom_y().set.contains(s.y, 1e-9));
      ASSERT_TRUE(p.geom_x().set.contains(s.x_bar, 1e-9));
      ASSERT_TRUE(p.geom_y().set.contains(s.y_bar, 1e-9));
    }
  }
}

TEST(Step, SameSeedSameTrajectory) {
  const auto p = cheap_quadratic();
  auto run = [&](std::uint64_t seed) {
    StochasticOracle o(p, NoiseModel::subgaussian(0.3, 0.3, 0.3, seed));
    return run_spdhg(p, o, spdhg_schedule(p, o.levels()), 200).x_bar;
  };
  EXPECT_EQ(run(5), run(5));
  EXPECT_NE(run(5), run(6));
}

// ---------------------------------------------------------------------------
// Hat sequences
// ---------------------------------------------------------------------------

TEST(HatSequence, ZeroNoiseKeepsHatConstant) {
  const auto p = matching_pennies();
  auto s = initial_state(p, Vector{{0.3, 0.7}}, Vector{{0.5, 0.5}}, true);
  ASSERT_TRUE(s.hat.has_value());
  for (int i = 0; i < 5; ++i)
    hat_sequence_step(s, PrimalProx::plain(p.geom_x()), p.geom_y(), Vector::Zero(2), 0.5, Vector::Zero(2), 0.5);
  EXPECT_LT((s.hat->x_hat - Vector{{0.3, 0.7}}).norm(), 1e-15);
  EXPECT_LT((s.hat->y_hat - Vector{{0.5, 0.5}}).norm(), 1e-15);
}

TEST(HatSequence, EuclideanStepMovesAlongNoise) {
  const auto gx = euclidean_geometry(FeasibleSet::full_space(2));
  const auto gy = euclidean_geometry(FeasibleSet::full_space(1));
  IterateState s;
  s.hat = HatIterates{Vector{{1.0, -1.0}}, Vector{{0.5}}};
  hat_sequence_step(s, PrimalProx::plain(gx), gy, Vector{{2.0, 4.0}}, 0.25, Vector{{-1.0}}, 0.5);
  // argmin -<n, u> + |u - u_hat|^2 / (2 step) = u_hat + step n.
  EXPECT_LT((s.hat->x_hat - Vector{{1.5, 0.0}}).norm(), 1e-15);
  EXPECT_LT((s.hat->y_hat - Vector{{0.0}}).norm(), 1e-15);
}

TEST(HatSequence, TrackedRunNeedsDiagnosticOracle) {
  const auto p = matching_pennies();
  StochasticOracle o(p, NoiseModel::subgaussian(0.1, 0.1, 0.1, 1));
  RunOptions opts;
  opts.track_hat = true;
  EXPECT_THROW(run_spdhg(p, o, spdhg_schedule(p, o.levels()), 10, opts), ConfigError);
}

// ---------------------------------------------------------------------------
// Runs
// ---------------------------------------------------------------------------

TEST(Run, MatchingPenniesGapWithinBound) {
  const auto p = matching_pennies();
  StochasticOracle o(p, NoiseModel::deterministic());
  RunOptions opts;
  opts.x1 = Vector{{0.8, 0.2}};
  opts.y1 = Vector{{0.3, 0.7}};
  opts.trajectory_diameters = true;
  opts.gap = [&](const Vector& x, const Vector& y) { return p.duality_gap(x, y); };
  const auto r = run_spdhg(p, o, spdhg_schedule(p), 2000, opts);
  ASSERT_FALSE(r.record.rows.empty());
  EXPECT_EQ(r.record.rows.back().t, 2000);
  for (const auto& row : r.record.rows) {
    ASSERT_TRUE(row.gap && row.B_E);
    EXPECT_LE(*row.gap, *row.B_E);
  }
  EXPECT_EQ(o.stats().total(), 3 * 1999);
}

TEST(Run, NoisyQuadraticGapWithinBoundOnAverage) {
  const auto p = cheap_quadratic(3);
  const int seeds = 10;
  double mean_gap = 0.0, bound = 0.0;
  for (int s = 0; s < seeds; ++s) {
    StochasticOracle o(p, NoiseModel::subgaussian(0.5, 0.5, 0.5, s));
    RunOptions opts;
    opts.gap = [&](const Vector& x, const Vector& y) { return p.duality_gap(x, y); };
    const auto r = run_spdhg(p, o, spdhg_schedule(p, o.levels()), 500, opts);
    mean_gap += *r.record.rows.back().gap / seeds;
    bound = *r.record.rows.back().B_E;
  }
  EXPECT_LE(mean_gap, bound);
}

TEST(Run, ShortHorizonRejected) {
  const auto p = matching_pennies();
  StochasticOracle o(p, NoiseModel::deterministic());
  EXPECT_THROW(run_spdhg(p, o, spdhg_schedule(p), 2), ConfigError);
}

TEST(Run, GeometricCheckpoints) {
  const auto c = geometric_checkpoints(20);
  EXPECT_EQ(c, (std::vector<long>{3, 4, 6, 8, 11, 15, 20}));
  EXPECT_EQ(geometric_checkpoints(3), std::vector<long>{3});
}

TEST(Run, RescaledEuclideanMatchesPlain) {
  // R^2 h((x - c) / R) with h = |.|^2 / 2 has the same Bregman distance as h.
  const auto p = cheap_quadratic(4);
  const auto sched = spdhg_schedule(p);
  const Vector x0 = p.geom_x().set.center_point();
  StochasticOracle a(p, NoiseModel::subgaussian(0.2, 0.2, 0.2, 9)), b(p, NoiseModel::subgaussian(0.2, 0.2, 0.2, 9));
  RunOptions opts;
  opts.x1 = x0;
  const auto plain = run_spdhg(p, a, sched, 300, opts);
  const auto resc = run_spdhg_rescaled(p, b, x0, 3.7, p.geom_x().set, 300, sched);
  EXPECT_LT((plain.x_bar - resc.x_bar).norm(), 1e-10);
  EXPECT_LT((plain.y_bar - resc.y_bar).norm(), 1e-10);
}

TEST(Run, RescaledRejectsMismatchedHorizonAndStart) {
  const auto p = cheap_quadratic();
  StochasticOracle o(p, NoiseModel::deterministic());
  const Vector x0 = p.geom_x().set.center_point();
  const auto sched = rescaled_schedule_det(p.constants(), 0.5, p.geom_y().bregman_diameter, 1.0, 50);
  EXPECT_THROW(run_spdhg_rescaled(p, o, x0, 1.0, p.geom_x().set, 60, sched), ConfigError);
  const FeasibleSet far = p.geom_x().set.intersect(Ball{x0 + Vector::Constant(3, 1.0), 0.5});
  EXPECT_THROW(run_spdhg_rescaled(p, o, x0, 1.0, far, 50, sched), DomainError);
}

// ---------------------------------------------------------------------------
// Restarts
// ---------------------------------------------------------------------------

TEST(Restart, DeterministicReachesTarget) {
  const auto p = cheap_quadratic(5);
  const Vector x1 = p.geom_x().set.center_point();
  const double U = 2.0 * norm_diameter(p.geom_x());
  const double eps = 1e-2;
  RestartOptions opts;
  opts.gap = [&](const Vector& x, const Vector& y) { return p.duality_gap(x, y); };
  const auto r = restart_deterministic(p, x1, U, eps, opts);
  ASSERT_EQ(static_cast<int>(r.record.stages.size()), r.plan.K);
  EXPECT_LE(p.duality_gap(r.x, r.y), eps);
  long total = 0;
  for (const auto& st : r.record.stages) {
    for (int k = 0; k < 3; ++k) EXPECT_EQ(st.calls[k], st.T - 1);
    total += st.T - 1;
    // Each stage output meets the quarter-contraction target mu R_k^2 / 16.
    EXPECT_LE(*st.gap, p.constants().mu * st.R * st.R / 16.0);
  }
  EXPECT_EQ(r.stats.total(), 3 * total);
}

TEST(Restart, StochasticStagesStayInTheirBalls) {
  const auto p = cheap_quadratic(6);
  StochasticOracle o(p, NoiseModel::subgaussian(0.01, 0.01, 0.01, 2));
  const Vector x0 = p.geom_x().set.center_point();
  const auto r = restart_stochastic(p, o, x0, 2.0 * norm_diameter(p.geom_x()), 0.5, 0.5);
  ASSERT_EQ(static_cast<int>(r.record.stages.size()), r.plan.K);
  EXPECT_NEAR(r.plan.varsigma, 0.5 / (6.0 * r.plan.K), 1e-15);
  for (const auto& st : r.record.stages) EXPECT_LE(st.max_center_distance, st.R / 2.0 + 1e-8);
}

TEST(Restart, StochasticNeedsEuclideanPrimal) {
  const auto p = matching_pennies();
  StochasticOracle o(p, NoiseModel::subgaussian(0.1, 0.1, 0.1, 1));
  EXPECT_THROW(restart_stochastic(p, o, Vector{{0.5, 0.5}}, 1.0, 0.1, 0.5), UnsupportedGeometry);
}

// ---------------------------------------------------------------------------
// Stopping and radius estimation
// ---------------------------------------------------------------------------

TEST(GradientMapping, ResidualThreshold) {
  const auto g = euclidean_geometry(FeasibleSet::full_space(2));
  const Vector grad{{0.1, 0.0}}, u{{0.0, 0.0}};
  // G = G_bar = (0.1, 0) at lambda = 1: residual 0.01 + 0.01.
  const auto a = gradient_mapping_stop(g, grad, u, SimpleFunction::zero(), 1.0, 1.0, 0.02);
  EXPECT_NEAR(a.residual, 0.02, 1e-15);
  EXPECT_TRUE(a.satisfied);
  EXPECT_LT((a.u_plus - Vector{{-0.1, 0.0}}).norm(), 1e-15);
  EXPECT_FALSE(gradient_mapping_stop(g, grad, u, SimpleFunction::zero(), 1.0, 1.0, 0.01).satisfied);
  const auto opt = gradient_mapping_stop(g, Vector::Zero(2), u, SimpleFunction::zero(), 1.0, 1.0, 1e-12);
  EXPECT_EQ(opt.residual, 0.0);
  EXPECT_TRUE(opt.satisfied);
}

TEST(GradientMapping, CertifiesObjectiveGap) {
  // F(u) = 0.5 u'Hu + e'u over a ball; satisfied implies F(u+) - F* <= epsilon.
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    const Index n = uniform_index(rng, 1, 4);
    const double mu = log_uniform(rng, 0.1, 1), L = mu * log_uniform(rng, 1, 20);
    Matrix Qm = Eigen::HouseholderQR<Matrix>(Matrix::Random(n, n)).householderQ();
    Vector ev = Vector::LinSpaced(n, mu, L);
    const Matrix H = Qm * ev.asDiagonal() * Qm.transpose();
    const Vector e = gaussian(rng, n, 3);
    const auto set = FeasibleSet::euclidean_ball(Vector::Zero(n), 1.0);
    const auto g = euclidean_geometry(set);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(H);
    const double fstar = minimize_quadratic(set, H, eig, e);
    const double eps = log_uniform(rng, 1e-6, 1e-1);
    Vector u = sample_point(set, rng);
    for (int it = 0; it < 10000; ++it) {
      const auto r = gradient_mapping_stop(g, H * u + e, u, SimpleFunction::zero(), 1.0 / L, mu, eps);
      if (r.satisfied) {
        EXPECT_LE(0.5 * r.u_plus.dot(H * r.u_plus) + e.dot(r.u_plus) - fstar, eps + 1e-12);
        break;
      }
      u = r.u_plus;
    }
  }
}

TEST(InitialRadius, BoundsDistanceToSaddle) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto p = cheap_quadratic(seed);
    const auto& s = *p.saddle_point();
    std::mt19937_64 rng(seed);
    const Vector x1 = sample_point(p.geom_x().set, rng);
    const auto est = estimate_initial_radius(p, x1, p.geom_y().set.center_point(), 1e-6);
    EXPECT_LE(est.lower, est.upper);
    EXPECT_GE(est.radius, (x1 - s.x).norm());
    EXPECT_NEAR(est.radius, std::sqrt(2.0 * (est.upper - est.lower) / p.constants().mu), 1e-12);
  }
}

TEST(InitialRadius, NeedsStrongConvexity) {
  const auto p = matching_pennies();
  EXPECT_THROW(estimate_initial_radius(p, Vector{{0.5, 0.5}}, Vector{{0.5, 0.5}}, 1e-3), ConfigError);
}
