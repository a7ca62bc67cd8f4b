#include <gtest/gtest.h>

#include <cmath>

#include "generators.hpp"
#include "saddlekit/geometry.hpp"
#include "saddlekit/reference.hpp"

using namespace saddlekit;
using namespace saddlekit::testing;

namespace {

// Negative entropy and its Bregman distance with a finite-difference gradient.
double neg_entropy(const Vector& u) { return (u.array() * u.array().log()).sum(); }

double fd_bregman(const Vector& u, const Vector& u_ref) {
  const double h = 1e-6;
  Vector grad(u_ref.size());
  for (Index i = 0; i < u_ref.size(); ++i) {
    Vector a = u_ref, b = u_ref;
    a[i] += h;
    b[i] -= h;
    grad[i] = (neg_entropy(a) - neg_entropy(b)) / (2 * h);
  }
  return neg_entropy(u) - neg_entropy(u_ref) - grad.dot(u - u_ref);
}

// Golden-section minimization on (lo, hi).
template <class F>
double golden_min(F f, double lo, double hi) {
  const double r = (std::sqrt(5.0) - 1) / 2;
  double a = lo, b = hi;
  for (int i = 0; i < 200; ++i) {
    const double c = b - r * (b - a), d = a + r * (b - a);
    (f(c) < f(d) ? b : a) = f(c) < f(d) ? d : c;
  }
  return 0.5 * (a + b);
}

}  // namespace

// ---------------------------------------------------------------------------
// Bregman distances
// ---------------------------------------------------------------------------

TEST(BregmanDistance, EuclideanHalfSquaredNorm) {
  const auto g = euclidean_geometry(FeasibleSet::full_space(2));
  EXPECT_DOUBLE_EQ(bregman_distance(g, Vector{{1.0, 0.0}}, Vector{{0.0, 0.0}}), 0.5);
}

TEST(BregmanDistance, EntropyIdentityIsZero) {
  const auto g = simplex_entropy_geometry(2);
  EXPECT_NEAR(bregman_distance(g, Vector{{0.3, 0.7}}, Vector{{0.3, 0.7}}), 0.0, 1e-15);
}

TEST(BregmanDistance, EntropyMatchesKullbackLeibler) {
  const Vector u{{0.5, 0.5}}, u_ref{{0.25, 0.75}};
  // Independent route: finite-difference gradient of the negative entropy.
  EXPECT_NEAR(fd_bregman(u, u_ref), 0.14384103622589042, 1e-8);
  EXPECT_NEAR(bregman_distance(simplex_entropy_geometry(2), u, u_ref), 0.14384103622589042, 1e-14);
}

TEST(BregmanDistance, EntropyBoundaryReferenceIsDomainError) {
  EXPECT_THROW(bregman_distance(simplex_entropy_geometry(2), Vector{{0.5, 0.5}}, Vector{{1.0, 0.0}}), DomainError);
}

TEST(BregmanDistance, StrongConvexityLowerBound) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 1000; ++i) {
    const auto c = random_geometry(rng, i);
    const Vector u = interior_point(c.geom, rng), v = interior_point(c.geom, rng);
    const double d = bregman_distance(c.geom, u, v);
    const double nrm = norm(c.geom.norm, u - v);
    EXPECT_GE(d, 0.5 * c.geom.modulus * nrm * nrm - 1e-12) << c.name;
    EXPECT_NEAR(bregman_distance(c.geom, u, u), 0.0, 1e-12) << c.name;
    if (std::isfinite(c.geom.bregman_diameter)) EXPECT_LE(d, c.geom.bregman_diameter + 1e-12) << c.name;
  }
}

TEST(Norms, HolderInequality) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 1000; ++i) {
    const NormKind n = i % 4 == 0   ? NormKind::l1()
                       : i % 4 == 1 ? NormKind::l2()
                       : i % 4 == 2 ? NormKind::lp(uniform(rng, 1.05, 2.0))
                                    : NormKind::nuclear();
    const Index d = n.tag == NormTag::SymmetricNuclear ? 3 : uniform_index(rng, 1, 8);
    const Vector u = n.tag == NormTag::SymmetricNuclear ? symmetric_gaussian(rng, d) : gaussian(rng, d);
    const Vector s = n.tag == NormTag::SymmetricNuclear ? symmetric_gaussian(rng, d) : gaussian(rng, d);
    EXPECT_LE(std::abs(s.dot(u)), dual_norm(n, s) * norm(n, u) * (1 + 1e-12));
  }
}

TEST(Norms, RejectsExponentOutsideRange) {
  EXPECT_THROW(NormKind::lp(2.5), ConfigError);
  EXPECT_THROW(NormKind::lp(1.0), ConfigError);
}

// ---------------------------------------------------------------------------
// Bregman proximal steps
// ---------------------------------------------------------------------------

TEST(BregmanProx, EntropyZeroTermReturnsReference) {
  const Vector u{{0.2, 0.3, 0.5}};
  const Vector out = bregman_prox(simplex_entropy_geometry(3), u, Vector::Zero(3), 3.7);
  EXPECT_LT((out - u).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(BregmanProx, EntropyClosedFormTwoPoint) {
  const Vector u{{0.5, 0.5}}, v{{std::log(2.0), 0.0}};
  // Independent route: golden-section search over the first coordinate.
  const auto obj = [&](double t) {
    const Vector w{{t, 1 - t}};
    return v.dot(w) + (w.array() * (w.array() / u.array()).log()).sum();
  };
  const double t = golden_min(obj, 1e-12, 1 - 1e-12);
  EXPECT_NEAR(t, 1.0 / 3.0, 1e-8);
  const Vector out = bregman_prox(simplex_entropy_geometry(2), u, v, 1.0);
  EXPECT_NEAR(out[0], 1.0 / 3.0, 1e-14);
  EXPECT_NEAR(out[1], 2.0 / 3.0, 1e-14);
}

TEST(BregmanProx, EuclideanFullSpaceIsGradientStep) {
  const Vector u{{1.0, -2.0, 0.5}}, v{{0.3, 0.1, -1.0}};
  const Vector out = bregman_prox(euclidean_geometry(FeasibleSet::full_space(3)), u, v, 0.7);
  EXPECT_LT((out - (u - 0.7 * v)).norm(), 1e-15);
}

TEST(BregmanProx, MatchesReferenceSolver) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 120; ++i) {
    const auto c = random_geometry(rng, i);
    const Vector u = interior_point(c.geom, rng);
    const Vector v = linear_term(c.geom, rng, log_uniform(rng, 1e-2, 2.0));
    const double lam = log_uniform(rng, 1e-2, 2.0);
    const Vector out = bregman_prox(c.geom, u, v, lam);
    const Vector ref = reference::prox(c.geom, u, v, lam);
    EXPECT_LT((out - ref).cwiseAbs().maxCoeff(), 1e-7) << c.name;
    EXPECT_TRUE(c.geom.set.contains(out, 1e-9)) << c.name;
  }
}

TEST(BregmanProx, OptimalityResidual) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 200; ++i) {
    const auto c = random_geometry(rng, i);
    if (c.geom.dgf != DgfKind::SquaredEuclidean && c.geom.dgf != DgfKind::SimplexEntropy) continue;
    const Vector u = interior_point(c.geom, rng);
    const Vector v = linear_term(c.geom, rng, 0.5);
    const double lam = log_uniform(rng, 0.1, 2.0);
    const Vector out = bregman_prox(c.geom, u, v, lam);
    EXPECT_LT(reference::prox_residual(c.geom, u, v, lam, out), 1e-6) << c.name;
  }
}

TEST(BregmanProx, ProximalInequality) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 300; ++i) {
    const auto c = random_geometry(rng, i);
    const bool entropic = c.geom.dgf == DgfKind::SimplexEntropy;
    const SimpleFunction phi = entropic && i % 2 ? SimpleFunction::scaled_dgf(uniform(rng, 0.1, 2.0))
                                                 : SimpleFunction::zero();
    const Vector u_ref = interior_point(c.geom, rng);
    const Vector v = linear_term(c.geom, rng, 1.0);
    const double lam = log_uniform(rng, 0.05, 2.0);
    const Vector up = bregman_prox(c.geom, u_ref, v, lam, phi);
    for (int j = 0; j < 5; ++j) {
      const Vector u = interior_point(c.geom, rng);
      const double nrm = norm(c.geom.norm, up - u_ref);
      const double lhs = simple_value(phi, c.geom, up) - simple_value(phi, c.geom, u);
      const double rhs = v.dot(u - up) +
                         (bregman_distance(c.geom, u, u_ref) - bregman_distance(c.geom, u, up)) / lam -
                         c.geom.modulus * nrm * nrm / (2 * lam);
      EXPECT_LE(lhs, rhs + 1e-9) << c.name;
    }
  }
}

TEST(BregmanProx, BallCutMatchesDykstra) {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 100; ++i) {
    const Index n = uniform_index(rng, 1, 10);
    const FeasibleSet base = i % 2 ? FeasibleSet::orthant(n) : FeasibleSet::simplex(n);
    const Vector center = sample_point(base, rng);
    const FeasibleSet cut = base.intersect(Ball{center, uniform(rng, 0.05, 1.0)});
    const Vector a = center + gaussian(rng, n);
    const Vector mine = project(cut, a);
    const Vector ref = reference::project_dykstra(cut, a);
    EXPECT_LT((mine - ref).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_TRUE(cut.contains(mine, 1e-9));
  }
}

// ---------------------------------------------------------------------------
// Rescaled distance and diameters
// ---------------------------------------------------------------------------

TEST(RescaledDistance, EuclideanIsScaleInvariant) {
  const RescaledDgf r{euclidean_geometry(FeasibleSet::full_space(2)), Vector{{3.0, -1.0}}, 7.5};
  const Vector x{{1.0, 2.0}}, xr{{-0.5, 0.0}};
  EXPECT_NEAR(rescaled_distance(r, x, xr), 0.5 * (x - xr).squaredNorm(), 1e-13);
}

TEST(RescaledDistance, EntropyIdentityRescaling) {
  const auto g = simplex_entropy_geometry(3);
  const RescaledDgf r{g, Vector::Zero(3), 1.0};
  const Vector x{{0.2, 0.3, 0.5}}, xr{{0.4, 0.4, 0.2}};
  EXPECT_NEAR(rescaled_distance(r, x, xr), bregman_distance(g, x, xr), 1e-15);
}

TEST(RescaledDistance, EntropyRadiusTwo) {
  const RescaledDgf r{simplex_entropy_geometry(2), Vector::Zero(2), 2.0};
  // 4 KL((0.25, 0.75) || (0.5, 0.5)), cross-checked by finite differences.
  EXPECT_NEAR(4 * fd_bregman(Vector{{0.25, 0.75}}, Vector{{0.5, 0.5}}), 0.5232481437645479, 1e-7);
  EXPECT_NEAR(rescaled_distance(r, Vector{{0.5, 1.5}}, Vector{{1.0, 1.0}}), 0.5232481437645479, 1e-13);
}

TEST(RescaledDistance, Invariants) {
  std::mt19937_64 rng(7);
  const double omega_prime = normalized_diameter(euclidean_geometry(FeasibleSet::full_space(4)));
  for (int i = 0; i < 500; ++i) {
    const Vector c = gaussian(rng, 4);
    const double R = log_uniform(rng, 0.1, 10.0);
    const RescaledDgf r{euclidean_geometry(FeasibleSet::full_space(4)), c, R};
    const Vector x = c + R * uniform(rng, 0, 1) * gaussian(rng, 4).normalized();
    const Vector xr = gaussian(rng, 4, R);
    EXPECT_NEAR(rescaled_distance(r, x, xr), R * R * bregman_distance(r.base, (x - c) / R, (xr - c) / R),
                1e-10 * (1 + R * R));
    EXPECT_GE(rescaled_distance(r, x, xr), 0.5 * (x - xr).squaredNorm() - 1e-12);
    EXPECT_LE(rescaled_distance(r, x, c), R * R * omega_prime + 1e-12);
  }
}

TEST(NormalizedDiameter, EuclideanIsHalf) {
  EXPECT_DOUBLE_EQ(normalized_diameter(euclidean_geometry(FeasibleSet::full_space(5))), 0.5);
  EXPECT_DOUBLE_EQ(normalized_diameter(euclidean_geometry(FeasibleSet::euclidean_ball(Vector{{4.0, -2.0}}, 1.0))),
                   0.5);
}

TEST(NormalizedDiameter, EntropyWithoutSurrogateIsUnsupported) {
  EXPECT_THROW(normalized_diameter(simplex_entropy_geometry(3)), UnsupportedGeometry);
  GeometrySpec g = simplex_entropy_geometry(3);
  g.normalized_diameter_surrogate = std::log(3.0);
  EXPECT_DOUBLE_EQ(normalized_diameter(g), std::log(3.0));
}

TEST(FeasibleSets, ProjectionLandsInSet) {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 500; ++i) {
    const auto c = random_geometry(rng, i);
    const Vector a = c.geom.dgf == DgfKind::MatrixEntropy ? symmetric_gaussian(rng, c.geom.set.matrix_side())
                                                           : gaussian(rng, c.geom.dim(), 2.0);
    EXPECT_TRUE(c.geom.set.contains(project(c.geom.set, a), 1e-9)) << c.name;
  }
}
