#pragma once

#include "saddlekit/geometry.hpp"
#include "saddlekit/problems.hpp"

namespace saddlekit {

struct GradientMappingResult {
  Vector u_plus;
  bool satisfied = false;
  double residual = 0.0;  // ||G_bar||_*^2 + ||G||^2
};

// One prox-gradient step from u_ref with gradient `grad` of the smooth part,
// plus the certificate built from the primal and mirror gradient mappings
//   G = (u_ref - u+) / lambda,  G_bar = (grad h(u_ref) - grad h(u+)) / lambda.
// When the smooth part is L-smooth with lambda <= 1/L and the composite
// objective is mu-strongly convex, `satisfied` implies an objective gap <= epsilon.
GradientMappingResult gradient_mapping_stop(const GeometrySpec& g, const VecRef& grad, const VecRef& u_ref,
                                            const SimpleFunction& phi, double lambda, double mu,
                                            double epsilon);

struct RadiusEstimate {
  double lower = 0.0;   // l <= min_x S(x, y_probe) <= S(x*, y*)
  double upper = 0.0;   // u >= sup_y S(x1, y)
  double radius = 0.0;  // sqrt(2 (u - l) / mu) >= ||x1 - x*||
  Vector x_eta;         // certified approximate best response to y_probe
  Vector y_eta;         // certified approximate regularized dual response to x1
};

// Deterministic upper bound on ||x1 - x*|| for strongly convex problems.
RadiusEstimate estimate_initial_radius(const SaddleProblem& p, const VecRef& x1, const VecRef& y_probe,
                                       double eta, long max_iterations = 1000000);

}  // namespace saddlekit
