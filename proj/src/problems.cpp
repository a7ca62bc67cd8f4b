#include "saddlekit/problems.hpp"

#include <cmath>
#include <random>
#include <string>

#include "saddlekit/stopping.hpp"

namespace saddlekit {

SaddleProblem::SaddleProblem(GeometrySpec geom_x, GeometrySpec geom_y, ProblemConstants constants,
                             SimpleFunction g, SimpleFunction J)
    : geom_x_(std::move(geom_x)),
      geom_y_(std::move(geom_y)),
      constants_(constants),
      g_(std::move(g)),
      J_(std::move(J)) {
  const auto& c = constants_;
  if (c.L < 0 || c.L_xx < 0 || c.L_yx < 0 || c.L_yy < 0 || c.mu < 0)
    throw ConfigError("problem constants must be nonnegative");
}

Vector SaddleProblem::component_grad_f(Index, const VecRef&) const {
  throw ConfigError("problem has no finite-sum structure");
}
Vector SaddleProblem::component_grad_x_phi(Index, const VecRef&, const VecRef&) const {
  throw ConfigError("problem has no finite-sum structure");
}
Vector SaddleProblem::component_grad_y_phi(Index, const VecRef&, const VecRef&) const {
  throw ConfigError("problem has no finite-sum structure");
}

Diameters SaddleProblem::diameters() const { return {norm_diameter(geom_x_), norm_diameter(geom_y_)}; }

FunctionalProblem::FunctionalProblem(Callbacks cb, GeometrySpec geom_x, GeometrySpec geom_y,
                                     ProblemConstants constants, SimpleFunction g, SimpleFunction J)
    : SaddleProblem(std::move(geom_x), std::move(geom_y), constants, std::move(g), std::move(J)),
      cb_(std::move(cb)) {
  if (!cb_.value_f || !cb_.grad_f || !cb_.value_phi || !cb_.grad_x_phi || !cb_.grad_y_phi)
    throw ConfigError("functional problem needs all five callbacks");
}

double evaluate_saddle(const SaddleProblem& p, const VecRef& x, const VecRef& y) {
  const double gx = simple_value(p.g(), p.geom_x(), x);
  const double jy = simple_value(p.J(), p.geom_y(), y);
  if (!std::isfinite(gx) || !std::isfinite(jy)) throw DomainError("g or J is infinite at the input");
  return p.value_f(x) + gx + p.value_phi(x, y) - jy;
}

// ---------------------------------------------------------------------------

ClosedFormInstance::ClosedFormInstance(InstanceKind kind, QuadraticData data, GeometrySpec geom_x,
                                       GeometrySpec geom_y, ProblemConstants constants,
                                       std::optional<SaddlePoint> saddle,
                                       std::vector<QuadraticComponent> components)
    : SaddleProblem(std::move(geom_x), std::move(geom_y), constants),
      kind_(kind),
      data_(std::move(data)),
      saddle_(std::move(saddle)),
      components_(std::move(components)) {
  const Index m = dim_x(), n = dim_y();
  if (data_.P.rows() != m || data_.P.cols() != m || data_.b.size() != m || data_.A.rows() != m ||
      data_.A.cols() != n || data_.Q.rows() != n || data_.Q.cols() != n || data_.c.size() != n) {
    throw ConfigError("quadratic instance data does not match the geometry dimensions");
  }
  eig_P_.compute(data_.P);
  eig_Q_.compute(data_.Q);
}

double ClosedFormInstance::value_f(const VecRef& x) const {
  return 0.5 * x.dot(data_.P * x) + data_.b.dot(x);
}
Vector ClosedFormInstance::grad_f(const VecRef& x) const { return data_.P * x + data_.b; }
double ClosedFormInstance::value_phi(const VecRef& x, const VecRef& y) const {
  return x.dot(data_.A * y) - 0.5 * y.dot(data_.Q * y) - data_.c.dot(y);
}
Vector ClosedFormInstance::grad_x_phi(const VecRef&, const VecRef& y) const { return data_.A * y; }
Vector ClosedFormInstance::grad_y_phi(const VecRef& x, const VecRef& y) const {
  return data_.A.transpose() * x - data_.Q * y - data_.c;
}

Vector ClosedFormInstance::component_grad_f(Index i, const VecRef& x) const {
  const auto& k = components_.at(static_cast<std::size_t>(i));
  return (data_.P + k.dP) * x + data_.b + k.db;
}
Vector ClosedFormInstance::component_grad_x_phi(Index i, const VecRef&, const VecRef& y) const {
  const auto& k = components_.at(static_cast<std::size_t>(i));
  return (data_.A + k.dA) * y;
}
Vector ClosedFormInstance::component_grad_y_phi(Index i, const VecRef& x, const VecRef& y) const {
  const auto& k = components_.at(static_cast<std::size_t>(i));
  return (data_.A + k.dA).transpose() * x - data_.Q * y - data_.c;
}

double ClosedFormInstance::primal_value(const VecRef& x) const {
  Vector e = data_.c - data_.A.transpose() * x;
  return value_f(x) - minimize_quadratic(geom_y_.set, data_.Q, eig_Q_, e);
}

double ClosedFormInstance::dual_value(const VecRef& y) const {
  Vector e = data_.b + data_.A * y;
  return minimize_quadratic(geom_x_.set, data_.P, eig_P_, e) - 0.5 * y.dot(data_.Q * y) - data_.c.dot(y);
}

double ClosedFormInstance::duality_gap(const VecRef& x, const VecRef& y) const {
  return primal_value(x) - dual_value(y);
}

// ---------------------------------------------------------------------------

namespace {

double linear_min(const FeasibleSet& s, const VecRef& e) {
  switch (s.tag) {
    case SetTag::Simplex:
      if (!s.cut) return e.minCoeff();
      break;
    case SetTag::Spectrahedron:
      if (!s.cut) {
        Matrix m = to_matrix(e, s.matrix_side());
        Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff();
      }
      break;
    case SetTag::EuclideanBall:
      if (!s.cut) return e.dot(s.ball.center) - s.ball.radius * e.norm();
      break;
    case SetTag::FullSpace:
      if (!s.cut) return e.isZero(0.0) ? 0.0 : -kInf;
      return e.dot(s.cut->center) - s.cut->radius * e.norm();
    case SetTag::NonnegativeOrthant:
      if (!s.cut) return e.minCoeff() >= 0.0 ? 0.0 : -kInf;
      if (s.cut->center.isZero(0.0)) return -s.cut->radius * (-e).cwiseMax(0.0).norm();
      break;
  }
  throw UnsupportedGeometry("no exact linear minimization for this set");
}

// min 0.5 z'Hz + g'z over ||z|| <= r (r = inf for the full space), H = V diag(lam) V'.
double trust_region_min(const Eigen::SelfAdjointEigenSolver<Matrix>& eig, const VecRef& g, double r) {
  const Vector& lam = eig.eigenvalues();
  const Vector gam = eig.eigenvectors().transpose() * g;
  const double zero_tol = 1e-13 * std::max(1.0, lam.cwiseAbs().maxCoeff());
  const double gam_tol = 1e-14 * std::max(1.0, gam.norm());

  bool interior_possible = true;
  double norm2 = 0.0, value = 0.0;
  for (Index i = 0; i < lam.size(); ++i) {
    if (lam[i] <= zero_tol) {
      if (std::abs(gam[i]) > gam_tol) interior_possible = false;
      continue;
    }
    norm2 += gam[i] * gam[i] / (lam[i] * lam[i]);
    value -= 0.5 * gam[i] * gam[i] / lam[i];
  }
  if (interior_possible && norm2 <= r * r) return value;
  if (!std::isfinite(r)) return -kInf;

  auto radius2 = [&](double m) {
    double s = 0.0;
    for (Index i = 0; i < lam.size(); ++i) s += gam[i] * gam[i] / ((lam[i] + m) * (lam[i] + m));
    return s;
  };
  double lo = 0.0, hi = gam.norm() / r;
  for (int it = 0; it < 300 && hi - lo > 1e-16 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (radius2(mid) > r * r) lo = mid; else hi = mid;
  }
  const double m = hi;
  value = 0.0;
  for (Index i = 0; i < lam.size(); ++i) {
    const double z = -gam[i] / (lam[i] + m);
    value += 0.5 * lam[i] * z * z + gam[i] * z;
  }
  return value;
}

}  // namespace

double minimize_quadratic(const FeasibleSet& set, const Matrix& H,
                          const Eigen::SelfAdjointEigenSolver<Matrix>& eig, const VecRef& e) {
  if (H.size() == 0 || H.cwiseAbs().maxCoeff() == 0.0) return linear_min(set, e);
  if (set.tag == SetTag::FullSpace && !set.cut) return trust_region_min(eig, e, kInf);
  const Ball* ball = nullptr;
  if (set.tag == SetTag::EuclideanBall && !set.cut) ball = &set.ball;
  if (set.tag == SetTag::FullSpace && set.cut) ball = &*set.cut;
  if (!ball) throw UnsupportedGeometry("quadratic minimization supports the full space and Euclidean balls");
  const Vector& c = ball->center;
  Vector g = H * c + e;
  return 0.5 * c.dot(H * c) + e.dot(c) + trust_region_min(eig, g, ball->radius);
}

// ---------------------------------------------------------------------------

namespace {

Matrix gaussian_matrix(Index r, Index c, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(r, c);
  for (Index j = 0; j < c; ++j)
    for (Index i = 0; i < r; ++i) m(i, j) = normal(rng);
  return m;
}

Matrix random_orthogonal(Index n, std::mt19937_64& rng) {
  Eigen::HouseholderQR<Matrix> qr(gaussian_matrix(n, n, rng));
  return qr.householderQ();
}

Vector linspace(Index n, double lo, double hi) {
  if (n == 1) return Vector::Constant(1, hi);
  return Vector::LinSpaced(n, lo, hi);
}

Matrix spd_with_spectrum(const Vector& spectrum, std::mt19937_64& rng) {
  Matrix U = random_orthogonal(spectrum.size(), rng);
  Matrix m = U * spectrum.asDiagonal() * U.transpose();
  return 0.5 * (m + m.transpose());
}

// m x n matrix whose singular values are spread over [top/2, top].
Matrix matrix_with_top_singular_value(Index m, Index n, double top, std::mt19937_64& rng) {
  const Index k = std::min(m, n);
  Matrix U = random_orthogonal(m, rng).leftCols(k);
  Matrix V = random_orthogonal(n, rng).leftCols(k);
  return U * linspace(k, 0.5 * top, top).asDiagonal() * V.transpose();
}

Vector random_direction(Index n, std::mt19937_64& rng) {
  return gaussian_matrix(n, 1, rng).col(0).normalized();
}

double spectral_norm(const Matrix& A) {
  if (A.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(A);
  return svd.singularValues()(0);
}

}  // namespace

ClosedFormInstance make_matrix_game(const Matrix& A, SimplexGeometry geometry) {
  const Index m = A.rows(), n = A.cols();
  if (m == 0 || n == 0) throw ConfigError("matrix game needs a nonempty payoff matrix");
  QuadraticData d{Matrix::Zero(m, m), Vector::Zero(m), A, Matrix::Zero(n, n), Vector::Zero(n)};
  ProblemConstants k;
  GeometrySpec gx, gy;
  if (geometry == SimplexGeometry::Entropy) {
    gx = simplex_entropy_geometry(m);
    gy = simplex_entropy_geometry(n);
    k.L_yx = A.cwiseAbs().maxCoeff();  // operator norm from l1 to l-infinity
  } else {
    gx = euclidean_geometry(FeasibleSet::simplex(m));
    gy = euclidean_geometry(FeasibleSet::simplex(n));
    k.L_yx = spectral_norm(A);
  }
  return ClosedFormInstance(InstanceKind::BilinearMatrixGame, std::move(d), std::move(gx), std::move(gy), k);
}

ClosedFormInstance matching_pennies(SimplexGeometry geometry) {
  Matrix A(2, 2);
  A << 1, -1, -1, 1;
  ClosedFormInstance base = make_matrix_game(A, geometry);
  Vector half = Vector::Constant(2, 0.5);
  return ClosedFormInstance(InstanceKind::BilinearMatrixGame, base.data(), base.geom_x(), base.geom_y(),
                            base.constants(), SaddlePoint{half, half});
}

ClosedFormInstance random_matrix_game(Index m, Index n, std::uint64_t seed, SimplexGeometry geometry) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Matrix A(m, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < m; ++i) A(i, j) = unif(rng);
  return make_matrix_game(A, geometry);
}

ClosedFormInstance make_quadratic_saddle(const QuadraticSaddleOptions& o) {
  if (o.dim_x < 1 || o.dim_y < 1) throw ConfigError("quadratic saddle dimensions must be positive");
  if (o.mu < 0 || o.L < o.mu || o.L_yx < 0 || o.L_yy < 0)
    throw ConfigError("quadratic saddle needs 0 <= mu <= L and nonnegative couplings");
  if (!(o.radius_x > 0 && o.radius_y > 0)) throw ConfigError("ball radii must be positive");
  if (!(o.saddle_fraction >= 0 && o.saddle_fraction < 1)) throw ConfigError("saddle_fraction must be in [0, 1)");
  std::mt19937_64 rng(o.seed);
  const Index m = o.dim_x, n = o.dim_y;

  Matrix P = spd_with_spectrum(linspace(m, o.mu, o.L), rng);
  Matrix A = matrix_with_top_singular_value(m, n, o.L_yx, rng);
  Matrix Q = o.L_yy > 0 ? spd_with_spectrum(linspace(n, 0.25 * o.L_yy, o.L_yy), rng) : Matrix::Zero(n, n);
  Vector xs = o.saddle_fraction * o.radius_x * random_direction(m, rng);
  Vector ys = o.saddle_fraction * o.radius_y * random_direction(n, rng);
  Vector b = -P * xs - A * ys;
  Vector c = A.transpose() * xs - Q * ys;

  std::vector<QuadraticComponent> comps;
  if (o.n_components > 0) {
    std::vector<QuadraticComponent> raw(static_cast<std::size_t>(o.n_components));
    QuadraticComponent mean{Matrix::Zero(m, m), Vector::Zero(m), Matrix::Zero(m, n)};
    for (auto& r : raw) {
      Matrix G = gaussian_matrix(m, m, rng);
      r.dP = o.component_scale * 0.5 * (G + G.transpose());
      r.db = o.component_scale * gaussian_matrix(m, 1, rng).col(0);
      r.dA = o.component_scale * gaussian_matrix(m, n, rng);
      mean.dP += r.dP;
      mean.db += r.db;
      mean.dA += r.dA;
    }
    const double k = static_cast<double>(o.n_components);
    for (auto& r : raw) {
      r.dP -= mean.dP / k;
      r.db -= mean.db / k;
      r.dA -= mean.dA / k;
    }
    comps = std::move(raw);
  }

  ProblemConstants k{o.L, 0.0, o.L_yx, o.L_yy, o.mu};
  QuadraticData d{std::move(P), std::move(b), std::move(A), std::move(Q), std::move(c)};
  return ClosedFormInstance(InstanceKind::StronglyConvexQuadraticSaddle, std::move(d),
                            euclidean_geometry(FeasibleSet::euclidean_ball(Vector::Zero(m), o.radius_x)),
                            euclidean_geometry(FeasibleSet::euclidean_ball(Vector::Zero(n), o.radius_y)), k,
                            SaddlePoint{std::move(xs), std::move(ys)}, std::move(comps));
}

ClosedFormInstance make_constrained_qp(const ConstrainedQpOptions& o) {
  if (o.dim_x < 1 || o.n_constraints < 1) throw ConfigError("constrained QP dimensions must be positive");
  if (!(o.mu > 0) || o.L < o.mu) throw ConfigError("constrained QP needs 0 < mu <= L");
  std::mt19937_64 rng(o.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const Index m = o.dim_x, k = o.n_constraints;

  Matrix P = spd_with_spectrum(linspace(m, o.mu, o.L), rng);
  Matrix C = matrix_with_top_singular_value(k, m, o.constraint_norm, rng);
  Vector xs = o.saddle_fraction * o.radius_x * random_direction(m, rng);

  // First half of the constraints active with positive multipliers, the rest slack.
  const Index active = (k + 1) / 2;
  Vector ys = Vector::Zero(k);
  for (Index i = 0; i < active; ++i) ys[i] = 0.5 + 0.5 * unif(rng);
  ys *= o.saddle_fraction * o.radius_y / ys.norm();
  Vector d = C * xs;
  for (Index i = active; i < k; ++i) d[i] += 0.1 + 0.9 * unif(rng);
  Vector b = -P * xs - C.transpose() * ys;

  ProblemConstants kc{o.L, 0.0, spectral_norm(C), 0.0, o.mu};
  QuadraticData data{std::move(P), std::move(b), C.transpose(), Matrix::Zero(k, k), std::move(d)};
  FeasibleSet Y = FeasibleSet::orthant(k).intersect(Ball{Vector::Zero(k), o.radius_y});
  return ClosedFormInstance(InstanceKind::LagrangianOfConstrainedQP, std::move(data),
                            euclidean_geometry(FeasibleSet::euclidean_ball(Vector::Zero(m), o.radius_x)),
                            euclidean_geometry(std::move(Y)), kc, SaddlePoint{std::move(xs), std::move(ys)});
}

// ---------------------------------------------------------------------------

Vector best_response_x(const SaddleProblem& p, const VecRef& y, double tol, long max_iterations) {
  const auto& k = p.constants();
  if (!(k.mu > 0)) throw ConfigError("best response needs mu > 0");
  if (!(tol > 0)) throw ConfigError("best response tolerance must be positive");
  const double lambda = 1.0 / (k.L + k.L_xx);
  Vector x = p.geom_x().set.center_point();
  for (long it = 0; it < max_iterations; ++it) {
    Vector grad = p.grad_f(x) + p.grad_x_phi(x, y);
    auto step = gradient_mapping_stop(p.geom_x(), grad, x, p.g(), lambda, k.mu, tol);
    if (step.satisfied) return step.u_plus;
    x = std::move(step.u_plus);
  }
  throw ConvergenceError("best response did not certify within the iteration cap");
}

}  // namespace saddlekit
