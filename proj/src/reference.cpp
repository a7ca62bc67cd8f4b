#include "saddlekit/reference.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace saddlekit::reference {
namespace {

Matrix sym(const VecRef& u, Index n) {
  Matrix m = Eigen::Map<const Matrix>(u.data(), n, n);
  return 0.5 * (m + m.transpose());
}

Vector flat(const Matrix& m) { return Eigen::Map<const Vector>(m.data(), m.size()); }

Index side(Index dim) { return static_cast<Index>(std::llround(std::sqrt(static_cast<double>(dim)))); }

Matrix matrix_log(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  Vector l = es.eigenvalues().array().log().matrix();
  return es.eigenvectors() * l.asDiagonal() * es.eigenvectors().transpose();
}

Vector project_spectrahedron(const VecRef& a) {
  const Index n = side(a.size());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym(a, n));
  Vector lam = project_simplex_bisect(es.eigenvalues());
  return flat(es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose());
}

Vector project_ball(const Ball& b, const VecRef& a) {
  const Vector d = a - b.center;
  const double r = d.norm();
  return r <= b.radius ? Vector(a) : Vector(b.center + d * (b.radius / r));
}

// ---------------------------------------------------------------------------
// E1: equality-constrained damped Newton.
Vector prox_simplex_entropy(const VecRef& u_ref, const VecRef& v, double lambda) {
  const Index n = u_ref.size();
  const Vector log_ref = u_ref.array().log().matrix();
  auto F = [&](const Vector& u) {
    return v.dot(u) + ((u.array() * (u.array().log() - log_ref.array())) - u.array() + u_ref.array()).sum() / lambda;
  };
  Vector u = Vector::Constant(n, 1.0 / static_cast<double>(n));
  for (int it = 0; it < 5000; ++it) {
    const Vector grad = v + (u.array().log().matrix() - log_ref) / lambda;
    const Vector hinv = lambda * u;  // inverse Hessian diagonal
    const double nu = -hinv.dot(grad) / hinv.sum();
    const Vector d = -(hinv.array() * (grad.array() + nu)).matrix();
    const double decrement = d.dot((d.array() / hinv.array()).matrix());
    if (decrement < 1e-26) break;
    double step = 1.0;
    for (Index i = 0; i < n; ++i)
      if (d[i] < 0) step = std::min(step, -0.99 * u[i] / d[i]);
    const double f0 = F(u);
    const double slope = grad.dot(d);
    while (step > 1e-20) {
      Vector cand = u + step * d;
      if (cand.minCoeff() > 0 && F(cand) <= f0 + 1e-4 * step * slope) break;
      step *= 0.5;
    }
    u += step * d;
    u /= u.sum();  // remove drift from rounding
  }
  return u;
}

// E2: equality-constrained damped Newton in an orthonormal basis of symmetric
// matrices. The Hessian of tr(U log U) comes from the divided differences of
// log over the eigenvalues of U.
Vector prox_matrix_entropy(const VecRef& u_ref, const VecRef& v, double lambda) {
  const Index n = side(u_ref.size());
  const Matrix Uref = sym(u_ref, n);
  const Matrix logref = matrix_log(Uref);
  const Matrix V = sym(v, n);
  auto F = [&](const Matrix& U) {
    return (V.cwiseProduct(U)).sum() +
           ((U * (matrix_log(U) - logref)).trace() - U.trace() + Uref.trace()) / lambda;
  };
  std::vector<Matrix> basis;
  for (Index i = 0; i < n; ++i)
    for (Index j = i; j < n; ++j) {
      Matrix E = Matrix::Zero(n, n);
      if (i == j) {
        E(i, i) = 1.0;
      } else {
        E(i, j) = E(j, i) = 1.0 / std::sqrt(2.0);
      }
      basis.push_back(E);
    }
  const Index m = static_cast<Index>(basis.size());
  Vector a(m);
  for (Index k = 0; k < m; ++k) a[k] = basis[k].trace();

  Matrix U = Matrix::Identity(n, n) / static_cast<double>(n);
  for (int it = 0; it < 500; ++it) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(U);
    const Vector ev = es.eigenvalues();
    const Matrix& Q = es.eigenvectors();
    const Matrix G = V + (Q * ev.array().log().matrix().asDiagonal() * Q.transpose() - logref) / lambda;
    Matrix Gamma(n, n);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j)
        Gamma(i, j) = std::abs(ev[i] - ev[j]) > 1e-12 * ev[i] ? (std::log(ev[i]) - std::log(ev[j])) / (ev[i] - ev[j])
                                                               : 2.0 / (ev[i] + ev[j]);
    std::vector<Matrix> rotated(static_cast<std::size_t>(m));
    for (Index k = 0; k < m; ++k) rotated[k] = Q.transpose() * basis[k] * Q;
    Matrix K = Matrix::Zero(m + 1, m + 1);
    Vector rhs = Vector::Zero(m + 1);
    for (Index k = 0; k < m; ++k) {
      rhs[k] = -(G.cwiseProduct(basis[k])).sum();
      for (Index l = k; l < m; ++l)
        K(k, l) = K(l, k) = (rotated[k].cwiseProduct(Gamma.cwiseProduct(rotated[l]))).sum() / lambda;
      K(k, m) = K(m, k) = a[k];
    }
    const Vector sol = K.fullPivLu().solve(rhs);
    Matrix D = Matrix::Zero(n, n);
    for (Index k = 0; k < m; ++k) D += sol[k] * basis[k];
    const double decrement = -(G.cwiseProduct(D)).sum();
    if (decrement < 1e-24) break;
    const double f0 = F(U);
    double step = 1.0;
    for (;;) {
      const Matrix cand = U + step * D;
      if (Eigen::SelfAdjointEigenSolver<Matrix>(cand).eigenvalues().minCoeff() > 0 &&
          F(cand) <= f0 - 1e-4 * step * decrement)
        break;
      step *= 0.5;
      if (step < 1e-20) return flat(U);
    }
    U += step * D;
    U = 0.5 * (U + U.transpose());
  }
  return flat(U);
}

// E3: enumerate supports; damped Newton on each support's open orthant.
struct PnormParts {
  double p;
  Vector grad(const Vector& u) const {
    const double nrm = u.cwiseAbs().array().pow(p).sum();
    if (nrm == 0.0) return Vector::Zero(u.size());
    const double N = std::pow(nrm, 1.0 / p);
    return (std::pow(N, 2.0 - p) * u.cwiseAbs().array().pow(p - 1.0) * u.array().sign()).matrix();
  }
  double value(const Vector& u) const {
    return 0.5 * std::pow(u.cwiseAbs().array().pow(p).sum(), 2.0 / p);
  }
};

Vector prox_pnorm_orthant(double p, const VecRef& u_ref, const VecRef& v, double lambda) {
  const Index n = u_ref.size();
  const PnormParts h{p};
  const Vector gref = h.grad(u_ref);
  auto F = [&](const Vector& u) { return v.dot(u) + (h.value(u) - h.value(u_ref) - gref.dot(u - u_ref)) / lambda; };
  Vector best;
  double best_val = kInf;
  for (long mask = 0; mask < (1L << n); ++mask) {
    std::vector<Index> S;
    for (Index i = 0; i < n; ++i)
      if (mask & (1L << i)) S.push_back(i);
    // Complement KKT: with u_i = 0, the partial derivative is v_i - gref_i / lambda >= 0.
    bool kkt = true;
    for (Index i = 0; i < n; ++i)
      if (!(mask & (1L << i)) && v[i] - gref[i] / lambda < -1e-10) kkt = false;
    if (!kkt) continue;
    Vector u = Vector::Zero(n);
    for (Index i : S) u[i] = 1.0;
    bool converged = S.empty();
    const Index m = static_cast<Index>(S.size());
    for (int it = 0; it < 400 && !converged; ++it) {
      const Vector g = v + (h.grad(u) - gref) / lambda;
      const double N = std::pow(u.cwiseAbs().array().pow(p).sum(), 1.0 / p);
      Vector gs(m), gh(m);
      Matrix H = Matrix::Zero(m, m);
      for (Index a = 0; a < m; ++a) {
        gs[a] = g[S[a]];
        gh[a] = std::pow(u[S[a]], p - 1.0);
      }
      H = (2.0 - p) * std::pow(N, 2.0 - 2.0 * p) * gh * gh.transpose();
      for (Index a = 0; a < m; ++a) H(a, a) += (p - 1.0) * std::pow(N, 2.0 - p) * std::pow(u[S[a]], p - 2.0);
      H /= lambda;
      const Vector d = -H.ldlt().solve(gs);
      if (-gs.dot(d) < 1e-26) {
        converged = true;
        break;
      }
      double step = 1.0;
      for (Index a = 0; a < m; ++a)
        if (d[a] < 0) step = std::min(step, -0.99 * u[S[a]] / d[a]);
      const double f0 = F(u);
      // Inside the quadratic convergence region the decrease is below rounding
      // of F; take the Newton step without the sufficient-decrease test.
      const bool local = -gs.dot(d) < 1e-12;
      for (;;) {
        Vector cand = u;
        for (Index a = 0; a < m; ++a) cand[S[a]] += step * d[a];
        if ((local && step == 1.0) || F(cand) <= f0 + 1e-4 * step * gs.dot(d)) {
          u = cand;
          break;
        }
        step *= 0.5;
        if (step < 1e-30) break;
      }
      if (step < 1e-30) {
        // Line search stalls at rounding level near a stationary point.
        converged = gs.cwiseAbs().maxCoeff() < 1e-9;
        break;
      }
      if (u.minCoeff() < 0) break;
    }
    if (!converged) continue;
    const double val = F(u);
    if (val < best_val) {
      best_val = val;
      best = u;
    }
  }
  if (best.size() == 0) throw ConvergenceError("reference p-norm prox found no support");
  return best;
}

}  // namespace

Vector project_simplex_bisect(const VecRef& a) {
  double lo = a.minCoeff() - 1.0, hi = a.maxCoeff();
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double mass = (a.array() - mid).max(0.0).sum();
    (mass > 1.0 ? lo : hi) = mid;
  }
  const double th = 0.5 * (lo + hi);
  Vector u = (a.array() - th).max(0.0).matrix();
  return u / u.sum();
}

Vector project_base(const FeasibleSet& s, const VecRef& a) {
  switch (s.tag) {
    case SetTag::FullSpace: return a;
    case SetTag::NonnegativeOrthant: return a.cwiseMax(0.0);
    case SetTag::Simplex: return project_simplex_bisect(a);
    case SetTag::Spectrahedron: return project_spectrahedron(a);
    case SetTag::EuclideanBall: return project_ball(s.ball, a);
  }
  return a;
}

Vector project_dykstra(const FeasibleSet& s, const VecRef& a, double tol, long max_iter) {
  if (!s.cut) return reference::project_base(s, a);
  Vector x = a, p = Vector::Zero(a.size()), q = Vector::Zero(a.size());
  for (long it = 0; it < max_iter; ++it) {
    const Vector y = reference::project_base(s, x + p);
    p = x + p - y;
    const Vector xn = project_ball(*s.cut, y + q);
    q = y + q - xn;
    const double change = (xn - x).norm();
    x = xn;
    if (change < tol && (y - xn).norm() < tol) break;
  }
  return x;
}

double prox_objective(const GeometrySpec& g, const VecRef& u_ref, const VecRef& v, double lambda, const VecRef& u) {
  return v.dot(u) + bregman_distance(g, u, u_ref) / lambda;
}

Vector prox(const GeometrySpec& g, const VecRef& u_ref, const VecRef& v, double lambda) {
  switch (g.dgf) {
    case DgfKind::SimplexEntropy: return prox_simplex_entropy(u_ref, v, lambda);
    case DgfKind::MatrixEntropy: return prox_matrix_entropy(u_ref, v, lambda);
    case DgfKind::HalfPNormSquared:
      if (g.set.tag != SetTag::NonnegativeOrthant || g.set.cut)
        throw UnsupportedGeometry("reference p-norm prox covers the orthant only");
      return prox_pnorm_orthant(g.norm.p, u_ref, v, lambda);
    case DgfKind::SquaredEuclidean: return project_dykstra(g.set, u_ref - lambda * v);
  }
  throw UnsupportedGeometry("unknown DGF");
}

double prox_residual(const GeometrySpec& g, const VecRef& u_ref, const VecRef& v, double lambda, const VecRef& u,
                     double s) {
  const Vector grad = v + (dgf_gradient(g, u) - dgf_gradient(g, u_ref)) / lambda;
  const Vector pu = project_dykstra(g.set, u - s * grad);
  return (u - pu).norm() / s;
}

MeasuredConstants measure_constants(const SaddleProblem& p, int pairs, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const GeometrySpec& gx = p.geom_x();
  const GeometrySpec& gy = p.geom_y();
  MeasuredConstants m;
  auto ratio = [](double num, double den) { return den > 1e-12 ? num / den : 0.0; };
  for (int i = 0; i < pairs; ++i) {
    const Vector x = sample_point(gx.set, rng), x2 = sample_point(gx.set, rng);
    const Vector y = sample_point(gy.set, rng), y2 = sample_point(gy.set, rng);
    const double dx = norm(gx.norm, x - x2), dy = norm(gy.norm, y - y2);
    m.L = std::max(m.L, ratio(dual_norm(gx.norm, p.grad_f(x) - p.grad_f(x2)), dx));
    m.L_xx = std::max(m.L_xx, ratio(dual_norm(gx.norm, p.grad_x_phi(x, y) - p.grad_x_phi(x2, y)), dx));
    m.L_yx = std::max(m.L_yx, ratio(dual_norm(gx.norm, p.grad_x_phi(x, y) - p.grad_x_phi(x, y2)), dy));
    m.L_yx = std::max(m.L_yx, ratio(dual_norm(gy.norm, p.grad_y_phi(x, y) - p.grad_y_phi(x2, y)), dx));
    m.L_yy = std::max(m.L_yy, ratio(dual_norm(gy.norm, p.grad_y_phi(x, y) - p.grad_y_phi(x, y2)), dy));
    if (dx > 1e-12) {
      const double lin = p.value_f(x) - p.value_f(x2) - p.grad_f(x2).dot(x - x2);
      m.mu_min = std::min(m.mu_min, 2.0 * lin / (dx * dx));
    }
    const double cvx = p.value_phi(x, y) - p.value_phi(x2, y) - p.grad_x_phi(x2, y).dot(x - x2);
    const double ccv = p.value_phi(x, y) - p.value_phi(x, y2) - p.grad_y_phi(x, y2).dot(y - y2);
    m.convexity_violation = std::max({m.convexity_violation, -cvx, ccv});
  }
  return m;
}

}  // namespace saddlekit::reference
