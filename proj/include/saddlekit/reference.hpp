#pragma once

// Independent numerical oracles for verification. None of these routines
// call the closed-form prox or projection code of the core library.

#include <random>

#include "saddlekit/geometry.hpp"
#include "saddlekit/problems.hpp"

namespace saddlekit::reference {

// Simplex projection by bisection on the threshold.
Vector project_simplex_bisect(const VecRef& a);

// Euclidean projection onto the base set (no cut), built on the bisection routine.
Vector project_base(const FeasibleSet& s, const VecRef& a);

// Dykstra's alternating projections onto base set and cut ball.
Vector project_dykstra(const FeasibleSet& s, const VecRef& a, double tol = 1e-13, long max_iter = 2000000);

// Objective phi(u) + <v, u> + D(u, u_ref) / lambda (phi = 0).
double prox_objective(const GeometrySpec& g, const VecRef& u_ref, const VecRef& v, double lambda, const VecRef& u);

// Minimizer of the prox objective by a method chosen per geometry:
//   simplex entropy        damped Newton on the KKT system
//   matrix entropy         projected gradient with backtracking
//   p-norm on the orthant  support enumeration with damped Newton
//   squared Euclidean      bisection / Dykstra projection of u_ref - lambda v
Vector prox(const GeometrySpec& g, const VecRef& u_ref, const VecRef& v, double lambda);

// Projected-gradient residual ||u - P(u - s grad F(u))|| / s of the prox
// objective at u, with a reference projection.
double prox_residual(const GeometrySpec& g, const VecRef& u_ref, const VecRef& v, double lambda, const VecRef& u,
                     double s = 1e-4);

// Smallest generalized eigen-style constants measured on random pairs.
struct MeasuredConstants {
  double L = 0.0;
  double L_xx = 0.0;
  double L_yx = 0.0;
  double L_yy = 0.0;
  double mu_min = kInf;          // min over pairs of 2 (f(x) - f(x') - <grad f(x'), x - x'>) / ||x - x'||^2
  double convexity_violation = 0.0;  // largest violation of the first-order convexity / concavity inequalities
};

MeasuredConstants measure_constants(const SaddleProblem& p, int pairs, std::uint64_t seed);

}  // namespace saddlekit::reference
