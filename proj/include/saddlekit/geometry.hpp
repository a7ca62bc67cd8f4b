#pragma once

#include <limits>
#include <optional>
#include <random>

#include "saddlekit/types.hpp"

namespace saddlekit {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Norms
// ---------------------------------------------------------------------------

enum class NormTag { L1, L2, Lp, SymmetricNuclear };

struct NormKind {
  NormTag tag = NormTag::L2;
  double p = 2.0;  // only meaningful for Lp, in (1, 2]

  static NormKind l1() { return {NormTag::L1, 1.0}; }
  static NormKind l2() { return {NormTag::L2, 2.0}; }
  static NormKind lp(double p);
  static NormKind nuclear() { return {NormTag::SymmetricNuclear, 1.0}; }

  // Exponent of the dual norm: inf for L1, 2 for L2, p/(p-1) for Lp.
  double dual_exponent() const;
};

double norm(const NormKind& n, const VecRef& u);
double dual_norm(const NormKind& n, const VecRef& u);

// ---------------------------------------------------------------------------
// Feasible sets
// ---------------------------------------------------------------------------

enum class SetTag { FullSpace, Simplex, Spectrahedron, NonnegativeOrthant, EuclideanBall };

struct Ball {
  Vector center;
  double radius = 0.0;
  bool operator==(const Ball&) const = default;
};

// A base set optionally cut by one Euclidean ball. Spectrahedron points are
// symmetric n x n matrices stored column-major as vectors of length n*n.
struct FeasibleSet {
  SetTag tag = SetTag::FullSpace;
  Index dim = 0;
  Ball ball;                // the set itself when tag == EuclideanBall
  std::optional<Ball> cut;  // intersection with a Euclidean ball

  static FeasibleSet full_space(Index n);
  static FeasibleSet simplex(Index n);
  static FeasibleSet spectrahedron(Index n);
  static FeasibleSet orthant(Index n);
  static FeasibleSet euclidean_ball(Vector center, double radius);

  FeasibleSet intersect(Ball b) const;

  Index matrix_side() const;  // n for spectrahedra
  bool contains(const VecRef& u, double tol = 1e-9) const;
  // Canonical interior starting point: uniform weights, I/n, ball center or origin.
  Vector center_point() const;

  bool operator==(const FeasibleSet&) const = default;
};

// Euclidean projection onto the base set (the cut, if any, is ignored).
Vector project_base(const FeasibleSet& s, const VecRef& u);
// Euclidean projection onto the full set including the cut.
Vector project(const FeasibleSet& s, const VecRef& u);

Vector sample_point(const FeasibleSet& s, std::mt19937_64& rng);

// ---------------------------------------------------------------------------
// Distance generating functions
// ---------------------------------------------------------------------------

enum class DgfKind { SquaredEuclidean, SimplexEntropy, MatrixEntropy, HalfPNormSquared };

struct GeometrySpec {
  NormKind norm;
  DgfKind dgf = DgfKind::SquaredEuclidean;
  FeasibleSet set;
  double modulus = 1.0;           // strong convexity of the DGF w.r.t. norm
  double bregman_diameter = kInf;  // sup of D(u, u') over the set
  // Caller-supplied value for DGFs whose normalized diameter is not computed.
  std::optional<double> normalized_diameter_surrogate;

  Index dim() const { return set.dim; }
};

GeometrySpec euclidean_geometry(FeasibleSet set);
GeometrySpec simplex_entropy_geometry(Index n);
GeometrySpec matrix_entropy_geometry(Index n);
// p in (1, 2]; set must be the orthant or the full space.
GeometrySpec half_pnorm_geometry(double p, FeasibleSet set);

// Same DGF and norm on a different set, with the diameter recomputed.
GeometrySpec with_set(const GeometrySpec& g, FeasibleSet set);

double dgf_value(const GeometrySpec& g, const VecRef& u);
Vector dgf_gradient(const GeometrySpec& g, const VecRef& u);

double bregman_distance(const GeometrySpec& g, const VecRef& u, const VecRef& u_ref);

// sup over the feasible set of D(u, u_ref). Finite for entropies at interior u_ref.
double max_distance_from(const GeometrySpec& g, const VecRef& u_ref);

// sup over the unit ball of D(z, 0).
double normalized_diameter(const GeometrySpec& g);

// sup of ||u - u'|| over the set in the geometry's norm.
double norm_diameter(const GeometrySpec& g);

// Upper bound on |h| over the feasible set, used to scale entropic regularization.
double dgf_range(const GeometrySpec& g);

// ---------------------------------------------------------------------------
// Prox-friendly functions and the Bregman proximal step
// ---------------------------------------------------------------------------

struct SimpleFunction {
  enum class Kind { Zero, Indicator, ScaledDgf };
  Kind kind = Kind::Zero;
  std::optional<FeasibleSet> set;  // Indicator
  double coef = 0.0;               // ScaledDgf: coef * h(u)

  static SimpleFunction zero() { return {}; }
  static SimpleFunction indicator(FeasibleSet s) { return {Kind::Indicator, std::move(s), 0.0}; }
  static SimpleFunction scaled_dgf(double c);
};

// Value of phi at u; +inf outside an indicator's set.
double simple_value(const SimpleFunction& phi, const GeometrySpec& g, const VecRef& u);

// argmin over the set of phi(u) + <v, u> + D(u, u_ref) / lambda.
Vector bregman_prox(const GeometrySpec& g, const VecRef& u_ref, const VecRef& v, double lambda,
                    const SimpleFunction& phi = SimpleFunction::zero());

// ---------------------------------------------------------------------------
// Rescaled DGF: h_R(x) = R^2 h((x - c) / R)
// ---------------------------------------------------------------------------

struct RescaledDgf {
  GeometrySpec base;
  Vector center;
  double radius = 1.0;
};

double rescaled_distance(const RescaledDgf& r, const VecRef& x, const VecRef& x_ref);

// Prox step under the rescaled distance over `set`. Supported for the squared
// Euclidean DGF on any set and for full-domain DGFs on the full space.
Vector rescaled_prox(const RescaledDgf& r, const FeasibleSet& set, const VecRef& x_ref,
                     const VecRef& v, double lambda);

// ---------------------------------------------------------------------------
// Matrix helpers for spectrahedron points
// ---------------------------------------------------------------------------

Matrix to_matrix(const VecRef& u, Index n);
Vector to_vector(const Matrix& m);

}  // namespace saddlekit
