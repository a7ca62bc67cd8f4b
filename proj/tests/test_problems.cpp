#include <gtest/gtest.h>

#include <cmath>

#include "generators.hpp"
#include "saddlekit/problems.hpp"
#include "saddlekit/reference.hpp"

using namespace saddlekit;
using namespace saddlekit::testing;

namespace {

Matrix pennies_matrix() {
  Matrix A(2, 2);
  A << 1, -1, -1, 1;
  return A;
}

// Direct evaluation of 0.5 x'Px + b'x + x'Ay - 0.5 y'Qy - c'y.
double direct_value(const QuadraticData& d, const Vector& x, const Vector& y) {
  return 0.5 * x.dot(d.P * x) + d.b.dot(x) + x.dot(d.A * y) - 0.5 * y.dot(d.Q * y) - d.c.dot(y);
}

std::vector<ClosedFormInstance> shipped_instances() {
  std::vector<ClosedFormInstance> out;
  out.push_back(matching_pennies());
  out.push_back(matching_pennies(SimplexGeometry::Euclidean));
  out.push_back(random_matrix_game(5, 4, 3));
  out.push_back(random_matrix_game(6, 6, 11, SimplexGeometry::Euclidean));
  out.push_back(make_quadratic_saddle({}));
  QuadraticSaddleOptions q;
  q.dim_x = 6;
  q.dim_y = 3;
  q.mu = 0.5;
  q.L = 8;
  q.L_yx = 2;
  q.L_yy = 0;
  q.seed = 9;
  q.n_components = 5;
  out.push_back(make_quadratic_saddle(q));
  out.push_back(make_constrained_qp({}));
  return out;
}

}  // namespace

TEST(EvaluateSaddle, ZeroPayoff) {
  const auto p = make_matrix_game(Matrix::Zero(2, 2));
  EXPECT_EQ(evaluate_saddle(p, Vector{{1.0, 0.0}}, Vector{{0.0, 1.0}}), 0.0);
}

TEST(EvaluateSaddle, MatchingPenniesCorner) {
  const auto p = matching_pennies();
  EXPECT_DOUBLE_EQ(evaluate_saddle(p, Vector{{1.0, 0.0}}, Vector{{1.0, 0.0}}), 1.0);
}

TEST(EvaluateSaddle, MatchesDirectFormula) {
  std::mt19937_64 rng(4);
  for (const auto& p : shipped_instances()) {
    for (int i = 0; i < 20; ++i) {
      const Vector x = sample_point(p.geom_x().set, rng), y = sample_point(p.geom_y().set, rng);
      EXPECT_NEAR(evaluate_saddle(p, x, y), direct_value(p.data(), x, y), 1e-10);
    }
  }
}

TEST(EvaluateSaddle, InfiniteRegularizerIsDomainError) {
  FunctionalProblem::Callbacks cb{
      [](const Vector&) { return 0.0; }, [](const Vector& x) { return Vector(Vector::Zero(x.size())); },
      [](const Vector&, const Vector&) { return 0.0; },
      [](const Vector& x, const Vector&) { return Vector(Vector::Zero(x.size())); },
      [](const Vector&, const Vector& y) { return Vector(Vector::Zero(y.size())); }};
  const FunctionalProblem p(cb, euclidean_geometry(FeasibleSet::full_space(2)),
                            euclidean_geometry(FeasibleSet::full_space(1)), {},
                            SimpleFunction::indicator(FeasibleSet::euclidean_ball(Vector::Zero(2), 1.0)));
  EXPECT_NO_THROW(evaluate_saddle(p, Vector{{0.5, 0.0}}, Vector{{0.0}}));
  EXPECT_THROW(evaluate_saddle(p, Vector{{2.0, 0.0}}, Vector{{0.0}}), DomainError);
}

TEST(Gradients, MatchFiniteDifferences) {
  std::mt19937_64 rng(5);
  const double h = 1e-6;
  for (const auto& p : shipped_instances()) {
    const Vector x = sample_point(p.geom_x().set, rng), y = sample_point(p.geom_y().set, rng);
    const Vector gx = p.grad_f(x) + p.grad_x_phi(x, y), gy = p.grad_y_phi(x, y);
    for (Index i = 0; i < x.size(); ++i) {
      Vector a = x, b = x;
      a[i] += h;
      b[i] -= h;
      EXPECT_NEAR((direct_value(p.data(), a, y) - direct_value(p.data(), b, y)) / (2 * h), gx[i], 1e-5);
    }
    for (Index j = 0; j < y.size(); ++j) {
      Vector a = y, b = y;
      a[j] += h;
      b[j] -= h;
      EXPECT_NEAR((direct_value(p.data(), x, a) - direct_value(p.data(), x, b)) / (2 * h), gy[j], 1e-5);
    }
  }
}

TEST(Components, AverageToExactGradients) {
  QuadraticSaddleOptions q;
  q.n_components = 7;
  q.seed = 2;
  const auto p = make_quadratic_saddle(q);
  ASSERT_EQ(p.num_components(), 7);
  std::mt19937_64 rng(6);
  const Vector x = sample_point(p.geom_x().set, rng), y = sample_point(p.geom_y().set, rng);
  Vector sf = Vector::Zero(x.size()), sx = Vector::Zero(x.size()), sy = Vector::Zero(y.size());
  for (Index i = 0; i < 7; ++i) {
    sf += p.component_grad_f(i, x);
    sx += p.component_grad_x_phi(i, x, y);
    sy += p.component_grad_y_phi(i, x, y);
  }
  EXPECT_LT((sf / 7 - p.grad_f(x)).norm(), 1e-12);
  EXPECT_LT((sx / 7 - p.grad_x_phi(x, y)).norm(), 1e-12);
  EXPECT_LT((sy / 7 - p.grad_y_phi(x, y)).norm(), 1e-12);
}

// ---------------------------------------------------------------------------
// Duality gap
// ---------------------------------------------------------------------------

TEST(DualityGap, MatchingPenniesExamples) {
  const auto p = matching_pennies();
  EXPECT_NEAR(p.duality_gap(Vector{{0.5, 0.5}}, Vector{{0.5, 0.5}}), 0.0, 1e-15);
  EXPECT_NEAR(p.duality_gap(Vector{{1.0, 0.0}}, Vector{{1.0, 0.0}}), 2.0, 1e-15);
  const auto z = make_matrix_game(Matrix::Zero(3, 2));
  EXPECT_EQ(z.duality_gap(Vector{{1.0, 0.0, 0.0}}, Vector{{0.5, 0.5}}), 0.0);
}

TEST(DualityGap, ZeroAtKnownSaddle) {
  for (const auto& p : shipped_instances()) {
    if (!p.saddle_point()) continue;
    const auto& s = *p.saddle_point();
    EXPECT_LE(std::abs(p.duality_gap(s.x, s.y)), 1e-9);
  }
}

TEST(DualityGap, NonnegativeAndDominatesSampledDeviations) {
  std::mt19937_64 rng(7);
  for (const auto& p : shipped_instances()) {
    for (int i = 0; i < 30; ++i) {
      const Vector x = sample_point(p.geom_x().set, rng), y = sample_point(p.geom_y().set, rng);
      const double gap = p.duality_gap(x, y);
      EXPECT_GE(gap, -1e-10);
      const double pv = p.primal_value(x), dv = p.dual_value(y);
      for (int k = 0; k < 20; ++k) {
        const Vector x2 = sample_point(p.geom_x().set, rng), y2 = sample_point(p.geom_y().set, rng);
        EXPECT_GE(pv, direct_value(p.data(), x, y2) - 1e-9);
        EXPECT_LE(dv, direct_value(p.data(), x2, y) + 1e-9);
      }
    }
  }
}

TEST(DualityGap, MatchingPenniesGridSupremum) {
  // For 2 x 2 games the sup over deviations is attained on a grid of pure and mixed points.
  const auto p = matching_pennies();
  const Matrix A = pennies_matrix();
  std::mt19937_64 rng(8);
  for (int i = 0; i < 50; ++i) {
    const Vector x = simplex_interior(rng, 2), y = simplex_interior(rng, 2);
    double best = -kInf;
    for (int a = 0; a <= 100; ++a)
      for (int b = 0; b <= 100; ++b) {
        const Vector x2{{a / 100.0, 1 - a / 100.0}}, y2{{b / 100.0, 1 - b / 100.0}};
        best = std::max(best, x.dot(A * y2) - x2.dot(A * y));
      }
    EXPECT_NEAR(p.duality_gap(x, y), best, 1e-12);
  }
}

// ---------------------------------------------------------------------------
// Constants
// ---------------------------------------------------------------------------

TEST(Constants, StatedValuesCertifiedByMeasurement) {
  std::uint64_t seed = 1;
  for (const auto& p : shipped_instances()) {
    const auto m = reference::measure_constants(p, 200, seed++);
    const auto& k = p.constants();
    EXPECT_LE(m.L, k.L + 1e-9);
    EXPECT_LE(m.L_xx, k.L_xx + 1e-9);
    EXPECT_LE(m.L_yx, k.L_yx + 1e-9);
    EXPECT_LE(m.L_yy, k.L_yy + 1e-9);
    EXPECT_GE(m.mu_min, k.mu - 1e-9);
    EXPECT_LE(m.convexity_violation, 1e-9);
  }
}

TEST(Constants, MatrixGameOperatorNorms) {
  std::mt19937_64 rng(9);
  Matrix A(3, 4);
  for (Index j = 0; j < 4; ++j) A.col(j) = gaussian(rng, 3);
  EXPECT_DOUBLE_EQ(make_matrix_game(A).constants().L_yx, A.cwiseAbs().maxCoeff());
  Eigen::JacobiSVD<Matrix> svd(A);
  EXPECT_NEAR(make_matrix_game(A, SimplexGeometry::Euclidean).constants().L_yx, svd.singularValues()(0), 1e-10);
}

TEST(Constants, QuadraticSaddleSpectra) {
  QuadraticSaddleOptions q;
  q.dim_x = 5;
  q.dim_y = 3;
  q.mu = 0.3;
  q.L = 7;
  q.L_yx = 1.5;
  q.L_yy = 2;
  const auto p = make_quadratic_saddle(q);
  Eigen::SelfAdjointEigenSolver<Matrix> eP(p.data().P), eQ(p.data().Q);
  EXPECT_NEAR(eP.eigenvalues().minCoeff(), 0.3, 1e-10);
  EXPECT_NEAR(eP.eigenvalues().maxCoeff(), 7.0, 1e-10);
  EXPECT_NEAR(eQ.eigenvalues().maxCoeff(), 2.0, 1e-10);
  EXPECT_GE(eQ.eigenvalues().minCoeff(), 0.5 - 1e-10);
  Eigen::JacobiSVD<Matrix> svd(p.data().A);
  EXPECT_NEAR(svd.singularValues()(0), 1.5, 1e-10);
}

TEST(Instances, SaddleInsideSets) {
  for (const auto& p : shipped_instances()) {
    if (!p.saddle_point()) continue;
    const auto& s = *p.saddle_point();
    EXPECT_TRUE(p.geom_x().set.contains(s.x));
    EXPECT_TRUE(p.geom_y().set.contains(s.y));
  }
}

TEST(Instances, InvalidOptionsRejected) {
  QuadraticSaddleOptions q;
  q.mu = 5;
  q.L = 1;
  EXPECT_THROW(make_quadratic_saddle(q), ConfigError);
  EXPECT_THROW(make_matrix_game(Matrix(0, 2)), ConfigError);
}

// ---------------------------------------------------------------------------
// Best response
// ---------------------------------------------------------------------------

TEST(BestResponse, RecoversSaddleComponent) {
  const auto p = make_quadratic_saddle({});
  const auto& s = *p.saddle_point();
  const Vector x = best_response_x(p, s.y, 1e-12);
  EXPECT_LT((x - s.x).norm(), 1e-5);
}

TEST(BestResponse, ObjectiveWithinTolerance) {
  std::mt19937_64 rng(10);
  QuadraticSaddleOptions q;
  q.seed = 4;
  const auto p = make_quadratic_saddle(q);
  for (int i = 0; i < 20; ++i) {
    const Vector y = sample_point(p.geom_y().set, rng);
    const double tol = 1e-8;
    const Vector x = best_response_x(p, y, tol);
    EXPECT_TRUE(p.geom_x().set.contains(x));
    EXPECT_LE(direct_value(p.data(), x, y) - p.dual_value(y), tol + 1e-12);
  }
}

TEST(BestResponse, NeedsStrongConvexity) {
  EXPECT_THROW(best_response_x(matching_pennies(), Vector{{0.5, 0.5}}, 1e-6), ConfigError);
}
