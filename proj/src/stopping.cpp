#include "saddlekit/stopping.hpp"

#include <algorithm>
#include <cmath>

namespace saddlekit {

GradientMappingResult gradient_mapping_stop(const GeometrySpec& g, const VecRef& grad, const VecRef& u_ref,
                                            const SimpleFunction& phi, double lambda, double mu,
                                            double epsilon) {
  if (!(lambda > 0) || !std::isfinite(lambda)) throw ConfigError("step size must be positive and finite");
  if (!(mu > 0)) throw ConfigError("strong convexity modulus must be positive");
  if (!(epsilon > 0)) throw ConfigError("tolerance must be positive");
  GradientMappingResult r;
  r.u_plus = bregman_prox(g, u_ref, grad, lambda, phi);
  const Vector gm = (u_ref - r.u_plus) / lambda;
  const Vector gm_bar = (dgf_gradient(g, u_ref) - dgf_gradient(g, r.u_plus)) / lambda;
  const double a = dual_norm(g.norm, gm_bar);
  const double b = norm(g.norm, gm);
  r.residual = a * a + b * b;
  // Relative slack absorbs rounding when the residual sits exactly on the threshold.
  r.satisfied = r.residual <= mu * epsilon * (1.0 + 1e-12);
  return r;
}

RadiusEstimate estimate_initial_radius(const SaddleProblem& p, const VecRef& x1, const VecRef& y_probe,
                                       double eta, long max_iterations) {
  const auto& k = p.constants();
  if (!(k.mu > 0)) throw ConfigError("radius estimation needs mu > 0");
  if (!(eta > 0)) throw ConfigError("eta must be positive");
  if (p.J().kind != SimpleFunction::Kind::Zero)
    throw UnsupportedGeometry("radius estimation supports J = 0 only");

  RadiusEstimate out;

  // Lower bound: eta-approximate best response to y_probe.
  out.x_eta = best_response_x(p, y_probe, eta, max_iterations);
  out.lower = evaluate_saddle(p, out.x_eta, y_probe) - eta;

  // Upper bound: eta-approximate maximizer of Phi(x1, .) - (eta / Upsilon) h_Y.
  const GeometrySpec& gy = p.geom_y();
  const double upsilon = dgf_range(gy);
  if (!(upsilon > 0) || !std::isfinite(upsilon)) throw UnsupportedGeometry("dual DGF range must be finite");
  const double c = eta / upsilon;
  const SimpleFunction reg = SimpleFunction::scaled_dgf(c);
  const double lambda = k.L_yy > 0 ? 1.0 / k.L_yy : 1e3 / c;
  const double mu_y = c * gy.modulus;
  Vector y = gy.set.center_point();
  bool done = false;
  for (long it = 0; it < max_iterations && !done; ++it) {
    const Vector grad = -p.grad_y_phi(x1, y);
    auto step = gradient_mapping_stop(gy, grad, y, reg, lambda, mu_y, eta);
    y = std::move(step.u_plus);
    done = step.satisfied;
  }
  if (!done) throw ConvergenceError("regularized dual response did not certify within the iteration cap");
  out.y_eta = y;
  // max_y Phi(x1, y) <= Phi(x1, y+) - c h(y+) + 2 eta, using |h| <= Upsilon on Y.
  out.upper = p.value_f(x1) + simple_value(p.g(), p.geom_x(), x1) + p.value_phi(x1, y) - c * dgf_value(gy, y) +
              2.0 * eta;
  out.radius = std::sqrt(2.0 * std::max(0.0, out.upper - out.lower) / k.mu);
  return out;
}

}  // namespace saddlekit
