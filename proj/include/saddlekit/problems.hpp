#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "saddlekit/geometry.hpp"

namespace saddlekit {

struct ProblemConstants {
  double L = 0.0;     // smoothness of f
  double L_xx = 0.0;  // x-Lipschitz constant of grad_x Phi
  double L_yx = 0.0;  // cross Lipschitz constant of the partial gradients
  double L_yy = 0.0;  // y-Lipschitz constant of grad_y Phi
  double mu = 0.0;    // strong convexity of f
};

struct Diameters {
  double D_X = kInf;
  double D_Y = kInf;
};

// min_x max_y  f(x) + g(x) + Phi(x, y) - J(y)  over X x Y.
class SaddleProblem {
 public:
  SaddleProblem(GeometrySpec geom_x, GeometrySpec geom_y, ProblemConstants constants,
                SimpleFunction g = SimpleFunction::zero(), SimpleFunction J = SimpleFunction::zero());
  virtual ~SaddleProblem() = default;

  virtual double value_f(const VecRef& x) const = 0;
  virtual Vector grad_f(const VecRef& x) const = 0;
  virtual double value_phi(const VecRef& x, const VecRef& y) const = 0;
  virtual Vector grad_x_phi(const VecRef& x, const VecRef& y) const = 0;
  virtual Vector grad_y_phi(const VecRef& x, const VecRef& y) const = 0;

  // Finite-sum structure: the exact gradients are averages of component
  // gradients over num_components() terms. Zero components means none.
  virtual Index num_components() const { return 0; }
  virtual Vector component_grad_f(Index i, const VecRef& x) const;
  virtual Vector component_grad_x_phi(Index i, const VecRef& x, const VecRef& y) const;
  virtual Vector component_grad_y_phi(Index i, const VecRef& x, const VecRef& y) const;

  const GeometrySpec& geom_x() const { return geom_x_; }
  const GeometrySpec& geom_y() const { return geom_y_; }
  const SimpleFunction& g() const { return g_; }
  const SimpleFunction& J() const { return J_; }
  const ProblemConstants& constants() const { return constants_; }
  Diameters diameters() const;

  Index dim_x() const { return geom_x_.dim(); }
  Index dim_y() const { return geom_y_.dim(); }

 protected:
  GeometrySpec geom_x_;
  GeometrySpec geom_y_;
  ProblemConstants constants_;
  SimpleFunction g_;
  SimpleFunction J_;
};

// User-defined problem from callables. Constants are taken as given.
class FunctionalProblem final : public SaddleProblem {
 public:
  struct Callbacks {
    std::function<double(const Vector&)> value_f;
    std::function<Vector(const Vector&)> grad_f;
    std::function<double(const Vector&, const Vector&)> value_phi;
    std::function<Vector(const Vector&, const Vector&)> grad_x_phi;
    std::function<Vector(const Vector&, const Vector&)> grad_y_phi;
  };

  FunctionalProblem(Callbacks cb, GeometrySpec geom_x, GeometrySpec geom_y, ProblemConstants constants,
                    SimpleFunction g = SimpleFunction::zero(), SimpleFunction J = SimpleFunction::zero());

  double value_f(const VecRef& x) const override { return cb_.value_f(x); }
  Vector grad_f(const VecRef& x) const override { return cb_.grad_f(x); }
  double value_phi(const VecRef& x, const VecRef& y) const override { return cb_.value_phi(x, y); }
  Vector grad_x_phi(const VecRef& x, const VecRef& y) const override { return cb_.grad_x_phi(x, y); }
  Vector grad_y_phi(const VecRef& x, const VecRef& y) const override { return cb_.grad_y_phi(x, y); }

 private:
  Callbacks cb_;
};

// S(x, y) = f(x) + g(x) + Phi(x, y) - J(y).
double evaluate_saddle(const SaddleProblem& p, const VecRef& x, const VecRef& y);

// ---------------------------------------------------------------------------
// Closed-form quadratic instances
//   f(x)      = 0.5 x'Px + b'x
//   Phi(x, y) = x'Ay - 0.5 y'Qy - c'y
// with g = J = 0 and the constraints carried by the geometries.
// ---------------------------------------------------------------------------

enum class InstanceKind { BilinearMatrixGame, StronglyConvexQuadraticSaddle, LagrangianOfConstrainedQP };

struct QuadraticData {
  Matrix P;
  Vector b;
  Matrix A;
  Matrix Q;
  Vector c;
};

// Zero-mean perturbation of the data; component i uses data + perturbation i.
struct QuadraticComponent {
  Matrix dP;
  Vector db;
  Matrix dA;
};

struct SaddlePoint {
  Vector x;
  Vector y;
};

class ClosedFormInstance final : public SaddleProblem {
 public:
  ClosedFormInstance(InstanceKind kind, QuadraticData data, GeometrySpec geom_x, GeometrySpec geom_y,
                     ProblemConstants constants, std::optional<SaddlePoint> saddle = std::nullopt,
                     std::vector<QuadraticComponent> components = {});

  double value_f(const VecRef& x) const override;
  Vector grad_f(const VecRef& x) const override;
  double value_phi(const VecRef& x, const VecRef& y) const override;
  Vector grad_x_phi(const VecRef& x, const VecRef& y) const override;
  Vector grad_y_phi(const VecRef& x, const VecRef& y) const override;

  Index num_components() const override { return static_cast<Index>(components_.size()); }
  Vector component_grad_f(Index i, const VecRef& x) const override;
  Vector component_grad_x_phi(Index i, const VecRef& x, const VecRef& y) const override;
  Vector component_grad_y_phi(Index i, const VecRef& x, const VecRef& y) const override;

  // sup over Y of S(x, .) and inf over X of S(., y), by exact inner solves.
  double primal_value(const VecRef& x) const;
  double dual_value(const VecRef& y) const;
  double duality_gap(const VecRef& x, const VecRef& y) const;

  InstanceKind kind() const { return kind_; }
  const QuadraticData& data() const { return data_; }
  const std::optional<SaddlePoint>& saddle_point() const { return saddle_; }

 private:
  InstanceKind kind_;
  QuadraticData data_;
  std::optional<SaddlePoint> saddle_;
  std::vector<QuadraticComponent> components_;
  Eigen::SelfAdjointEigenSolver<Matrix> eig_P_;
  Eigen::SelfAdjointEigenSolver<Matrix> eig_Q_;
};

// min over the set of 0.5 u'Hu + e'u, where H is PSD with eigendecomposition `eig`.
// Supports H = 0 on every set kind used by the shipped instances and general H
// on the full space and on Euclidean balls (trust-region secular equation).
double minimize_quadratic(const FeasibleSet& set, const Matrix& H,
                          const Eigen::SelfAdjointEigenSolver<Matrix>& eig, const VecRef& e);

enum class SimplexGeometry { Entropy, Euclidean };

ClosedFormInstance make_matrix_game(const Matrix& A, SimplexGeometry geometry = SimplexGeometry::Entropy);
ClosedFormInstance matching_pennies(SimplexGeometry geometry = SimplexGeometry::Entropy);
// Uniform entries in [-1, 1].
ClosedFormInstance random_matrix_game(Index m, Index n, std::uint64_t seed,
                                      SimplexGeometry geometry = SimplexGeometry::Entropy);

struct QuadraticSaddleOptions {
  Index dim_x = 4;
  Index dim_y = 4;
  double mu = 1.0;    // smallest eigenvalue of P
  double L = 4.0;     // largest eigenvalue of P
  double L_yx = 1.0;  // largest singular value of A
  double L_yy = 0.5;  // largest eigenvalue of Q; Q has spectrum in [L_yy/4, L_yy]
  double radius_x = 2.0;
  double radius_y = 2.0;
  // The saddle point sits at this fraction of each radius from the ball center.
  double saddle_fraction = 0.4;
  std::uint64_t seed = 1;
  Index n_components = 0;  // finite-sum components (0: none)
  double component_scale = 0.5;
};

ClosedFormInstance make_quadratic_saddle(const QuadraticSaddleOptions& opt);

struct ConstrainedQpOptions {
  Index dim_x = 4;
  Index n_constraints = 3;
  double mu = 1.0;
  double L = 4.0;
  double constraint_norm = 1.0;  // largest singular value of the constraint matrix
  double radius_x = 2.0;
  double radius_y = 2.0;
  double saddle_fraction = 0.4;
  std::uint64_t seed = 1;
};

// Lagrangian of min 0.5 x'Px + b'x s.t. Cx <= d over a ball, with multipliers in
// the orthant cut by a ball. Built from a chosen KKT pair so the saddle is known.
ClosedFormInstance make_constrained_qp(const ConstrainedQpOptions& opt);

// Strongly convex in x: argmin over X of f + g + Phi(., y), certified by the
// gradient-mapping criterion so that the objective gap is at most tol.
Vector best_response_x(const SaddleProblem& p, const VecRef& y, double tol,
                       long max_iterations = 1000000);

}  // namespace saddlekit
