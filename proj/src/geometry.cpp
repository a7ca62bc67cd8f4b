#include "saddlekit/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace saddlekit {
namespace {

constexpr double kLogFloor = 1e-300;
constexpr double kBallResidualTol = 1e-10;
constexpr int kBisectionIters = 200;

double lp_norm(const VecRef& u, double p) {
  const double m = u.cwiseAbs().maxCoeff();
  if (m == 0.0) return 0.0;
  double s = 0.0;
  for (Index i = 0; i < u.size(); ++i) s += std::pow(std::abs(u[i]) / m, p);
  return m * std::pow(s, 1.0 / p);
}

Index side_of(Index dim) {
  const auto n = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(dim))));
  if (n * n != dim) throw DomainError("vector length is not a square: " + std::to_string(dim));
  return n;
}

Matrix symmetric_part(const VecRef& u) {
  const Index n = side_of(u.size());
  Matrix m = to_matrix(u, n);
  return 0.5 * (m + m.transpose());
}

Eigen::SelfAdjointEigenSolver<Matrix> eig(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  if (es.info() != Eigen::Success) throw ConvergenceError("symmetric eigensolver failed");
  return es;
}

Vector matrix_log_vec(const VecRef& u) {
  auto es = eig(symmetric_part(u));
  Vector logs = es.eigenvalues().cwiseMax(kLogFloor).array().log().matrix();
  return to_vector(es.eigenvectors() * logs.asDiagonal() * es.eigenvectors().transpose());
}

Vector softmax(const Vector& xi) {
  const double m = xi.maxCoeff();
  Vector e = (xi.array() - m).exp().matrix();
  return e / e.sum();
}

Vector project_simplex(const VecRef& u) {
  const Index n = u.size();
  std::vector<double> s(u.data(), u.data() + n);
  std::sort(s.begin(), s.end(), std::greater<>());
  double cum = 0.0, theta = 0.0;
  for (Index k = 0; k < n; ++k) {
    cum += s[k];
    const double t = (cum - 1.0) / static_cast<double>(k + 1);
    if (s[k] - t > 0.0) theta = t;
  }
  return (u.array() - theta).cwiseMax(0.0).matrix();
}

void require_dim(const FeasibleSet& s, const VecRef& u, const char* what) {
  if (u.size() != s.dim) {
    throw DomainError(std::string(what) + ": expected dimension " + std::to_string(s.dim) +
                      ", got " + std::to_string(u.size()));
  }
}

// Euclidean prox onto base ∩ cut: minimize 0.5||x - a||^2. The multiplier mu of
// the ball constraint enters through w = 2 mu / (1 + 2 mu) in [0, 1), where
// x(w) = P_base((1 - w) a + w c) and ||x(w) - c|| is nonincreasing in w.
Vector ball_cut_projection(const FeasibleSet& s, const VecRef& a) {
  const Ball& cut = *s.cut;
  auto point = [&](double w) { return project_base(s, (1.0 - w) * a + w * cut.center); };
  auto residual = [&](const Vector& x) { return (x - cut.center).norm() - cut.radius; };

  Vector x = point(0.0);
  if (residual(x) <= 0.0) return x;
  Vector x_hi = point(1.0);
  if (residual(x_hi) > kBallResidualTol) {
    throw ConvergenceError("ball cut does not intersect the base set; cannot bracket multiplier");
  }
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < kBisectionIters; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    Vector xm = point(mid);
    const double r = residual(xm);
    if (r > 0.0) {
      lo = mid;
    } else {
      hi = mid;
      x_hi = std::move(xm);
      if (r >= -kBallResidualTol) break;
    }
  }
  return x_hi;
}

double dot(const VecRef& a, const VecRef& b) { return a.dot(b); }

}  // namespace

// ---------------------------------------------------------------------------

NormKind NormKind::lp(double p) {
  if (!(p > 1.0 && p <= 2.0)) throw ConfigError("Lp norm requires p in (1, 2]");
  return {NormTag::Lp, p};
}

double NormKind::dual_exponent() const {
  switch (tag) {
    case NormTag::L1: return kInf;
    case NormTag::L2: return 2.0;
    case NormTag::Lp: return p / (p - 1.0);
    case NormTag::SymmetricNuclear: return kInf;
  }
  return 2.0;
}

double norm(const NormKind& n, const VecRef& u) {
  switch (n.tag) {
    case NormTag::L1: return u.lpNorm<1>();
    case NormTag::L2: return u.norm();
    case NormTag::Lp: return lp_norm(u, n.p);
    case NormTag::SymmetricNuclear:
      return eig(symmetric_part(u)).eigenvalues().cwiseAbs().sum();
  }
  return u.norm();
}

double dual_norm(const NormKind& n, const VecRef& u) {
  switch (n.tag) {
    case NormTag::L1: return u.size() ? u.cwiseAbs().maxCoeff() : 0.0;
    case NormTag::L2: return u.norm();
    case NormTag::Lp: return lp_norm(u, n.dual_exponent());
    case NormTag::SymmetricNuclear:
      return eig(symmetric_part(u)).eigenvalues().cwiseAbs().maxCoeff();
  }
  return u.norm();
}

// ---------------------------------------------------------------------------

FeasibleSet FeasibleSet::full_space(Index n) { return {SetTag::FullSpace, n, {}, {}}; }
FeasibleSet FeasibleSet::simplex(Index n) { return {SetTag::Simplex, n, {}, {}}; }
FeasibleSet FeasibleSet::spectrahedron(Index n) { return {SetTag::Spectrahedron, n * n, {}, {}}; }
FeasibleSet FeasibleSet::orthant(Index n) { return {SetTag::NonnegativeOrthant, n, {}, {}}; }

FeasibleSet FeasibleSet::euclidean_ball(Vector center, double radius) {
  if (!(radius > 0.0)) throw ConfigError("ball radius must be positive");
  const Index n = center.size();
  return {SetTag::EuclideanBall, n, Ball{std::move(center), radius}, {}};
}

FeasibleSet FeasibleSet::intersect(Ball b) const {
  if (cut) throw UnsupportedGeometry("a set carries at most one ball cut");
  if (b.center.size() != dim) throw DomainError("ball cut dimension mismatch");
  if (!(b.radius > 0.0)) throw ConfigError("ball cut radius must be positive");
  FeasibleSet s = *this;
  s.cut = std::move(b);
  return s;
}

Index FeasibleSet::matrix_side() const { return side_of(dim); }

bool FeasibleSet::contains(const VecRef& u, double tol) const {
  if (u.size() != dim) return false;
  if (!u.allFinite()) return false;
  bool ok = true;
  switch (tag) {
    case SetTag::FullSpace: break;
    case SetTag::NonnegativeOrthant: ok = u.minCoeff() >= -tol; break;
    case SetTag::Simplex: ok = u.minCoeff() >= -tol && std::abs(u.sum() - 1.0) <= tol; break;
    case SetTag::Spectrahedron: {
      const Index n = matrix_side();
      Matrix m = to_matrix(u, n);
      if ((m - m.transpose()).cwiseAbs().maxCoeff() > tol) return false;
      ok = eig(m).eigenvalues().minCoeff() >= -tol && std::abs(m.trace() - 1.0) <= tol;
      break;
    }
    case SetTag::EuclideanBall: ok = (u - ball.center).norm() <= ball.radius + tol; break;
  }
  if (ok && cut) ok = (u - cut->center).norm() <= cut->radius + tol;
  return ok;
}

Vector FeasibleSet::center_point() const {
  Vector c;
  switch (tag) {
    case SetTag::FullSpace:
    case SetTag::NonnegativeOrthant: c = Vector::Zero(dim); break;
    case SetTag::Simplex: c = Vector::Constant(dim, 1.0 / static_cast<double>(dim)); break;
    case SetTag::Spectrahedron: {
      const Index n = matrix_side();
      c = to_vector(Matrix::Identity(n, n) / static_cast<double>(n));
      break;
    }
    case SetTag::EuclideanBall: c = ball.center; break;
  }
  if (cut && (c - cut->center).norm() > cut->radius) c = project(*this, cut->center);
  return c;
}

Vector project_base(const FeasibleSet& s, const VecRef& u) {
  require_dim(s, u, "project");
  switch (s.tag) {
    case SetTag::FullSpace: return u;
    case SetTag::NonnegativeOrthant: return u.cwiseMax(0.0);
    case SetTag::Simplex: return project_simplex(u);
    case SetTag::Spectrahedron: {
      auto es = eig(symmetric_part(u));
      Vector lam = project_simplex(es.eigenvalues());
      return to_vector(es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose());
    }
    case SetTag::EuclideanBall: {
      Vector d = u - s.ball.center;
      const double nd = d.norm();
      if (nd <= s.ball.radius) return u;
      return s.ball.center + d * (s.ball.radius / nd);
    }
  }
  return u;
}

Vector project(const FeasibleSet& s, const VecRef& u) {
  if (!s.cut) return project_base(s, u);
  require_dim(s, u, "project");
  return ball_cut_projection(s, u);
}

Vector sample_point(const FeasibleSet& s, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::exponential_distribution<double> expo(1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  auto gaussian = [&](Index n) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v[i] = normal(rng);
    return v;
  };
  auto dirichlet = [&](Index n) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v[i] = expo(rng) + 1e-12;
    return Vector(v / v.sum());
  };
  auto in_ball = [&](const Ball& b) {
    Vector d = gaussian(b.center.size());
    const double r = b.radius * std::pow(unif(rng), 1.0 / static_cast<double>(d.size()));
    return Vector(b.center + d.normalized() * r);
  };
  auto draw_base = [&]() -> Vector {
    switch (s.tag) {
      case SetTag::FullSpace: return gaussian(s.dim);
      case SetTag::NonnegativeOrthant: return gaussian(s.dim).cwiseAbs();
      case SetTag::Simplex: return dirichlet(s.dim);
      case SetTag::Spectrahedron: {
        const Index n = s.matrix_side();
        Eigen::HouseholderQR<Matrix> qr(Matrix(gaussian(n * n).reshaped(n, n)));
        Matrix q = qr.householderQ();
        Vector lam = dirichlet(n);
        Matrix m = q * lam.asDiagonal() * q.transpose();
        return to_vector(0.5 * (m + m.transpose()));
      }
      case SetTag::EuclideanBall: return in_ball(s.ball);
    }
    return gaussian(s.dim);
  };
  if (!s.cut) return draw_base();
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Vector u = s.tag == SetTag::FullSpace ? in_ball(*s.cut) : draw_base();
    if (s.tag == SetTag::NonnegativeOrthant) u = in_ball(*s.cut).cwiseAbs();
    if (s.contains(u, 0.0)) return u;
  }
  return project(s, in_ball(*s.cut));
}

// ---------------------------------------------------------------------------

namespace {

double euclidean_diameter(const FeasibleSet& s) {
  double base = kInf;
  switch (s.tag) {
    case SetTag::Simplex:
    case SetTag::Spectrahedron: base = 1.0; break;
    case SetTag::EuclideanBall: base = 2.0 * s.ball.radius * s.ball.radius; break;
    case SetTag::NonnegativeOrthant:
      // Orthant ∩ ball centered at the origin: any two points have a nonnegative
      // inner product, so ||u - u'||^2 <= 2 r^2.
      if (s.cut && s.cut->center.isZero(0.0)) return s.cut->radius * s.cut->radius;
      break;
    case SetTag::FullSpace: break;
  }
  if (s.cut) base = std::min(base, 2.0 * s.cut->radius * s.cut->radius);
  return base;
}

double compute_diameter(DgfKind dgf, const FeasibleSet& s) {
  return dgf == DgfKind::SquaredEuclidean ? euclidean_diameter(s) : kInf;
}

}  // namespace

GeometrySpec euclidean_geometry(FeasibleSet set) {
  GeometrySpec g;
  g.norm = NormKind::l2();
  g.dgf = DgfKind::SquaredEuclidean;
  g.modulus = 1.0;
  g.bregman_diameter = euclidean_diameter(set);
  g.set = std::move(set);
  return g;
}

GeometrySpec simplex_entropy_geometry(Index n) {
  GeometrySpec g;
  g.norm = NormKind::l1();
  g.dgf = DgfKind::SimplexEntropy;
  g.set = FeasibleSet::simplex(n);
  g.modulus = 1.0;
  g.bregman_diameter = kInf;
  return g;
}

GeometrySpec matrix_entropy_geometry(Index n) {
  GeometrySpec g;
  g.norm = NormKind::nuclear();
  g.dgf = DgfKind::MatrixEntropy;
  g.set = FeasibleSet::spectrahedron(n);
  g.modulus = 1.0;
  g.bregman_diameter = kInf;
  return g;
}

GeometrySpec half_pnorm_geometry(double p, FeasibleSet set) {
  if (set.tag != SetTag::NonnegativeOrthant && set.tag != SetTag::FullSpace) {
    throw UnsupportedGeometry("half squared p-norm DGF is supported on the orthant or full space");
  }
  if (set.cut) throw UnsupportedGeometry("half squared p-norm DGF does not support ball cuts");
  GeometrySpec g;
  g.norm = NormKind::lp(p);
  g.dgf = DgfKind::HalfPNormSquared;
  g.modulus = p - 1.0;
  g.bregman_diameter = kInf;
  g.set = std::move(set);
  return g;
}

GeometrySpec with_set(const GeometrySpec& g, FeasibleSet set) {
  GeometrySpec out = g;
  out.bregman_diameter = compute_diameter(g.dgf, set);
  out.set = std::move(set);
  return out;
}

double dgf_value(const GeometrySpec& g, const VecRef& u) {
  switch (g.dgf) {
    case DgfKind::SquaredEuclidean: return 0.5 * u.squaredNorm();
    case DgfKind::SimplexEntropy: {
      if (u.minCoeff() < 0.0) throw DomainError("entropy undefined at negative coordinates");
      double s = 0.0;
      for (Index i = 0; i < u.size(); ++i)
        if (u[i] > 0.0) s += u[i] * std::log(u[i]);
      return s;
    }
    case DgfKind::MatrixEntropy: {
      Vector lam = eig(symmetric_part(u)).eigenvalues();
      if (lam.minCoeff() < -1e-12) throw DomainError("matrix entropy undefined off the PSD cone");
      double s = 0.0;
      for (Index i = 0; i < lam.size(); ++i)
        if (lam[i] > 0.0) s += lam[i] * std::log(lam[i]);
      return s;
    }
    case DgfKind::HalfPNormSquared: {
      const double n = lp_norm(u, g.norm.p);
      return 0.5 * n * n;
    }
  }
  return 0.0;
}

Vector dgf_gradient(const GeometrySpec& g, const VecRef& u) {
  switch (g.dgf) {
    case DgfKind::SquaredEuclidean: return u;
    case DgfKind::SimplexEntropy:
      if (u.minCoeff() < 0.0) throw DomainError("entropy gradient at negative coordinates");
      return (1.0 + u.array().max(kLogFloor).log()).matrix();
    case DgfKind::MatrixEntropy: {
      const Index n = side_of(u.size());
      return to_vector(Matrix::Identity(n, n)) + matrix_log_vec(u);
    }
    case DgfKind::HalfPNormSquared: {
      const double p = g.norm.p;
      const double nrm = lp_norm(u, p);
      if (nrm == 0.0) return Vector::Zero(u.size());
      Vector grad(u.size());
      for (Index i = 0; i < u.size(); ++i) {
        const double a = std::abs(u[i]);
        grad[i] = a == 0.0 ? 0.0 : std::copysign(nrm * std::pow(a / nrm, p - 1.0), u[i]);
      }
      return grad;
    }
  }
  return u;
}

double bregman_distance(const GeometrySpec& g, const VecRef& u, const VecRef& u_ref) {
  if (u.size() != u_ref.size()) throw DomainError("bregman_distance: dimension mismatch");
  switch (g.dgf) {
    case DgfKind::SquaredEuclidean: return 0.5 * (u - u_ref).squaredNorm();
    case DgfKind::SimplexEntropy: {
      if (u_ref.minCoeff() <= 0.0)
        throw DomainError("entropy reference point on the domain boundary");
      if (u.minCoeff() < 0.0) throw DomainError("entropy undefined at negative coordinates");
      double s = 0.0;
      for (Index i = 0; i < u.size(); ++i) {
        s += u_ref[i] - u[i];
        if (u[i] > 0.0) s += u[i] * std::log(u[i] / u_ref[i]);
      }
      return std::max(s, 0.0);
    }
    case DgfKind::MatrixEntropy: {
      auto es_ref = eig(symmetric_part(u_ref));
      if (es_ref.eigenvalues().minCoeff() <= 0.0)
        throw DomainError("matrix entropy reference point is singular");
      Matrix um = symmetric_part(u);
      Matrix log_ref = es_ref.eigenvectors() * es_ref.eigenvalues().array().log().matrix().asDiagonal() *
                       es_ref.eigenvectors().transpose();
      const double s = dgf_value(g, u) - (um * log_ref).trace() - um.trace() +
                       symmetric_part(u_ref).trace();
      return std::max(s, 0.0);
    }
    case DgfKind::HalfPNormSquared: {
      const double s = dgf_value(g, u) - dgf_value(g, u_ref) - dot(dgf_gradient(g, u_ref), u - u_ref);
      return std::max(s, 0.0);
    }
  }
  return 0.0;
}

double max_distance_from(const GeometrySpec& g, const VecRef& u_ref) {
  const FeasibleSet& s = g.set;
  switch (g.dgf) {
    case DgfKind::SimplexEntropy:
      return -std::log(std::max(u_ref.minCoeff(), kLogFloor));
    case DgfKind::MatrixEntropy: {
      const double lmin = eig(symmetric_part(u_ref)).eigenvalues().minCoeff();
      return -std::log(std::max(lmin, kLogFloor));
    }
    case DgfKind::HalfPNormSquared: return kInf;
    case DgfKind::SquaredEuclidean: break;
  }
  double best = kInf;
  switch (s.tag) {
    case SetTag::Simplex: {
      // Convex in u, so the sup sits at a vertex.
      const double base = u_ref.squaredNorm();
      best = 0.0;
      for (Index i = 0; i < u_ref.size(); ++i)
        best = std::max(best, 0.5 * (base - 2.0 * u_ref[i] + 1.0));
      break;
    }
    case SetTag::Spectrahedron: {
      Matrix m = symmetric_part(u_ref);
      best = 0.5 * (1.0 - 2.0 * eig(m).eigenvalues().minCoeff() + m.squaredNorm());
      break;
    }
    case SetTag::EuclideanBall: {
      const double d = (u_ref - s.ball.center).norm() + s.ball.radius;
      best = 0.5 * d * d;
      break;
    }
    default: break;
  }
  if (s.cut) {
    const double d = (u_ref - s.cut->center).norm() + s.cut->radius;
    best = std::min(best, 0.5 * d * d);
  }
  return best;
}

double normalized_diameter(const GeometrySpec& g) {
  if (g.normalized_diameter_surrogate) return *g.normalized_diameter_surrogate;
  switch (g.dgf) {
    case DgfKind::SquaredEuclidean:
    case DgfKind::HalfPNormSquared:
      // Both have full domain, vanish with zero gradient at the origin, and equal
      // 0.5 * ||z||^2 in their own norm.
      return 0.5;
    default:
      throw UnsupportedGeometry(
          "normalized diameter unavailable: entropy domain does not contain the unit ball; "
          "supply a surrogate");
  }
}

double norm_diameter(const GeometrySpec& g) {
  const FeasibleSet& s = g.set;
  double d = kInf;
  switch (s.tag) {
    case SetTag::Simplex:
      d = g.norm.tag == NormTag::L2 ? std::sqrt(2.0)
          : g.norm.tag == NormTag::Lp ? std::pow(2.0, 1.0 / g.norm.p)
                                      : 2.0;
      break;
    case SetTag::Spectrahedron: d = g.norm.tag == NormTag::SymmetricNuclear ? 2.0 : std::sqrt(2.0); break;
    case SetTag::EuclideanBall:
      if (g.norm.tag == NormTag::L2) d = 2.0 * s.ball.radius;
      break;
    case SetTag::NonnegativeOrthant:
      if (s.cut && g.norm.tag == NormTag::L2 && s.cut->center.isZero(0.0))
        return std::sqrt(2.0) * s.cut->radius;
      break;
    case SetTag::FullSpace: break;
  }
  if (s.cut && g.norm.tag == NormTag::L2) d = std::min(d, 2.0 * s.cut->radius);
  return d;
}

double dgf_range(const GeometrySpec& g) {
  const FeasibleSet& s = g.set;
  switch (g.dgf) {
    case DgfKind::SimplexEntropy:
    case DgfKind::MatrixEntropy: {
      const double n = static_cast<double>(g.dgf == DgfKind::SimplexEntropy ? s.dim : s.matrix_side());
      return std::max(std::log(n), 0.0);
    }
    case DgfKind::SquaredEuclidean: {
      double r = kInf;
      if (s.tag == SetTag::Simplex || s.tag == SetTag::Spectrahedron) r = 0.5;
      if (s.tag == SetTag::EuclideanBall) {
        const double d = s.ball.center.norm() + s.ball.radius;
        r = 0.5 * d * d;
      }
      if (s.cut) {
        const double d = s.cut->center.norm() + s.cut->radius;
        r = std::min(r, 0.5 * d * d);
      }
      return r;
    }
    case DgfKind::HalfPNormSquared: return kInf;
  }
  return kInf;
}

// ---------------------------------------------------------------------------

SimpleFunction SimpleFunction::scaled_dgf(double c) {
  if (!(c >= 0.0)) throw ConfigError("scaled DGF coefficient must be nonnegative");
  return {Kind::ScaledDgf, std::nullopt, c};
}

double simple_value(const SimpleFunction& phi, const GeometrySpec& g, const VecRef& u) {
  switch (phi.kind) {
    case SimpleFunction::Kind::Zero: return 0.0;
    case SimpleFunction::Kind::Indicator: return phi.set->contains(u) ? 0.0 : kInf;
    case SimpleFunction::Kind::ScaledDgf: return phi.coef == 0.0 ? 0.0 : phi.coef * dgf_value(g, u);
  }
  return 0.0;
}

namespace {

Vector prox_entropy(const VecRef& u_ref, const VecRef& v, double lambda) {
  Vector xi = u_ref.array().max(kLogFloor).log().matrix() - lambda * v;
  return softmax(xi);
}

Vector prox_matrix_entropy(const VecRef& u_ref, const VecRef& v, double lambda) {
  const Index n = side_of(u_ref.size());
  Vector xi_vec = matrix_log_vec(u_ref) - lambda * to_vector(symmetric_part(v));
  auto es = eig(to_matrix(xi_vec, n));
  Vector w = softmax(es.eigenvalues());
  Matrix out = es.eigenvectors() * w.asDiagonal() * es.eigenvectors().transpose();
  return to_vector(0.5 * (out + out.transpose()));
}

// Gradient of the conjugate 0.5 * ||z||_q^2.
Vector conjugate_pnorm_gradient(const VecRef& z, double q) {
  const double nz = lp_norm(z, q);
  Vector out = Vector::Zero(z.size());
  if (nz == 0.0) return out;
  for (Index i = 0; i < z.size(); ++i) {
    const double a = std::abs(z[i]);
    if (a > 0.0) out[i] = std::copysign(nz * std::pow(a / nz, q - 1.0), z[i]);
  }
  return out;
}

// minimize 0.5||u||_p^2 + <w, u> over the orthant. Only coordinates with w_i < 0
// are active and the minimizer lies on the ray s * r with r_i = |w_i|^(q-1); the
// remaining scalar problem is quadratic in s.
Vector prox_pnorm_orthant(const VecRef& w, double p) {
  const double q = p / (p - 1.0);
  Vector r = Vector::Zero(w.size());
  double wmax = 0.0;
  for (Index i = 0; i < w.size(); ++i)
    if (w[i] < 0.0) wmax = std::max(wmax, -w[i]);
  if (wmax == 0.0) return r;
  for (Index i = 0; i < w.size(); ++i)
    if (w[i] < 0.0) r[i] = std::pow(-w[i] / wmax, q - 1.0);
  const double rp = lp_norm(r, p);
  const double s = -w.dot(r) / (rp * rp);
  return s * r;
}

}  // namespace

Vector bregman_prox(const GeometrySpec& g_in, const VecRef& u_ref, const VecRef& v_in, double lambda,
                    const SimpleFunction& phi) {
  require_dim(g_in.set, u_ref, "bregman_prox reference");
  require_dim(g_in.set, v_in, "bregman_prox linear term");
  if (!(lambda > 0.0)) throw DomainError("bregman_prox: stepsize must be positive");
  if (!u_ref.allFinite() || !v_in.allFinite()) throw DomainError("bregman_prox: non-finite input");

  GeometrySpec g = g_in;
  Vector v = v_in;
  switch (phi.kind) {
    case SimpleFunction::Kind::Zero: break;
    case SimpleFunction::Kind::Indicator: {
      const FeasibleSet& s = *phi.set;
      if (s == g.set) break;
      if (g.dgf == DgfKind::SquaredEuclidean && s.tag == SetTag::EuclideanBall && !s.cut) {
        g.set = g.set.intersect(s.ball);
        break;
      }
      throw UnsupportedGeometry("indicator prox only supports the feasible set itself or a Euclidean ball");
    }
    case SimpleFunction::Kind::ScaledDgf:
      if (phi.coef > 0.0) {
        v += phi.coef * dgf_gradient(g, u_ref);
        lambda = std::isfinite(lambda) ? lambda / (1.0 + phi.coef * lambda) : 1.0 / phi.coef;
      }
      break;
  }

  if (!std::isfinite(lambda)) {
    if (v.isZero(0.0)) return u_ref;
    throw DomainError("bregman_prox: infinite stepsize with a nonzero linear term");
  }

  switch (g.dgf) {
    case DgfKind::SquaredEuclidean: {
      Vector a = u_ref - lambda * v;
      return g.set.cut ? ball_cut_projection(g.set, a) : project_base(g.set, a);
    }
    case DgfKind::SimplexEntropy:
      if (g.set.tag != SetTag::Simplex || g.set.cut)
        throw UnsupportedGeometry("entropy prox requires the plain simplex");
      return prox_entropy(u_ref, v, lambda);
    case DgfKind::MatrixEntropy:
      if (g.set.tag != SetTag::Spectrahedron || g.set.cut)
        throw UnsupportedGeometry("matrix entropy prox requires the plain spectrahedron");
      return prox_matrix_entropy(u_ref, v, lambda);
    case DgfKind::HalfPNormSquared: {
      if (g.set.cut) throw UnsupportedGeometry("p-norm prox does not support ball cuts");
      Vector w = lambda * v - dgf_gradient(g, u_ref);
      if (g.set.tag == SetTag::NonnegativeOrthant) return prox_pnorm_orthant(w, g.norm.p);
      if (g.set.tag == SetTag::FullSpace) return conjugate_pnorm_gradient(-w, g.norm.dual_exponent());
      throw UnsupportedGeometry("p-norm prox requires the orthant or the full space");
    }
  }
  throw UnsupportedGeometry("unknown DGF");
}

// ---------------------------------------------------------------------------

double rescaled_distance(const RescaledDgf& r, const VecRef& x, const VecRef& x_ref) {
  if (!(r.radius > 0.0)) throw ConfigError("rescaling radius must be positive");
  const double R = r.radius;
  return R * R * bregman_distance(r.base, (x - r.center) / R, (x_ref - r.center) / R);
}

Vector rescaled_prox(const RescaledDgf& r, const FeasibleSet& set, const VecRef& x_ref, const VecRef& v,
                     double lambda) {
  if (r.base.dgf == DgfKind::SquaredEuclidean) {
    return bregman_prox(euclidean_geometry(set), x_ref, v, lambda);
  }
  if (set.tag == SetTag::FullSpace && !set.cut && r.base.dgf == DgfKind::HalfPNormSquared) {
    // minimize <v, x> + R^2 D((x - c)/R, (x_ref - c)/R) / lambda, substituting x = c + R z.
    const double R = r.radius;
    GeometrySpec base = half_pnorm_geometry(r.base.norm.p, FeasibleSet::full_space(set.dim));
    Vector z = bregman_prox(base, (x_ref - r.center) / R, v / R, lambda);
    return r.center + R * z;
  }
  throw UnsupportedGeometry("rescaled prox needs the squared Euclidean DGF or a full-domain DGF on the full space");
}

Matrix to_matrix(const VecRef& u, Index n) {
  if (u.size() != n * n) throw DomainError("to_matrix: size mismatch");
  return u.reshaped(n, n);
}

Vector to_vector(const Matrix& m) { return m.reshaped(); }

}  // namespace saddlekit
