#include "saddlekit/spdhg.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace saddlekit {

PrimalProx PrimalProx::rescaled_on(const GeometrySpec& base, const FeasibleSet& set, const VecRef& center,
                                   double R) {
  if (!(R > 0)) throw ConfigError("rescaling radius must be positive");
  if (base.dgf != DgfKind::SquaredEuclidean && set.tag != SetTag::FullSpace)
    throw UnsupportedGeometry("rescaled non-Euclidean prox needs the full space as constraint set");
  PrimalProx out;
  out.geom = with_set(base, set);
  out.rescaled = RescaledDgf{base, Vector(center), R};
  return out;
}

Vector PrimalProx::step(const SimpleFunction& g, const VecRef& x_ref, const VecRef& v, double lambda) const {
  if (!rescaled || geom.dgf == DgfKind::SquaredEuclidean) return bregman_prox(geom, x_ref, v, lambda, g);
  if (g.kind != SimpleFunction::Kind::Zero) throw UnsupportedGeometry("rescaled non-Euclidean prox needs g = 0");
  return rescaled_prox(*rescaled, geom.set, x_ref, v, lambda);
}

IterateState initial_state(const SaddleProblem& p, const VecRef& x1, const VecRef& y1, bool track_hat) {
  if (x1.size() != p.dim_x() || y1.size() != p.dim_y()) throw DomainError("initial point dimension mismatch");
  if (!p.geom_x().set.contains(x1, 1e-9)) throw DomainError("initial primal point is infeasible");
  if (!p.geom_y().set.contains(y1, 1e-9)) throw DomainError("initial dual point is infeasible");
  IterateState s;
  s.x = x1;
  s.y = y1;
  s.x_bar = x1;
  s.y_bar = y1;
  s.x_tilde = x1;
  s.t = 1;
  if (track_hat) s.hat = HatIterates{Vector(x1), Vector(y1)};
  return s;
}

void hat_sequence_step(IterateState& s, const PrimalProx& prox, const GeometrySpec& geom_y, const VecRef& noise_x,
                       double tau_t, const VecRef& noise_y, double alpha_t) {
  if (!s.hat) throw ConfigError("hat sequences are not tracked by this state");
  if (noise_x.size() == 0 || noise_y.size() == 0) throw ConfigError("hat sequences need retained noise vectors");
  s.hat->x_hat = prox.step(SimpleFunction::zero(), s.hat->x_hat, -noise_x, tau_t);
  s.hat->y_hat = bregman_prox(geom_y, s.hat->y_hat, -noise_y, alpha_t);
}

void spdhg_step(const SaddleProblem& p, StochasticOracle& o, IterateState& s, const ScheduleParams& sched,
                const PrimalProx& prox) {
  if (s.hat && !o.diagnostic()) throw ConfigError("hat sequences need an oracle in diagnostic mode");
  const long t = s.t;
  const double theta = sched.theta(t);
  const double alpha = sched.alpha(t);
  const double beta = sched.beta(t);
  const double tau = sched.tau(t);

  GradientSample gy = o.sample(GradKind::GradYPhi, s.x, s.y);
  if (s.gy_prev.size() == 0)
    s.s = gy.value;
  else
    s.s = (1.0 + theta) * gy.value - theta * s.gy_prev;

  Vector y_next = bregman_prox(p.geom_y(), s.y, -s.s, alpha, p.J());
  s.x_tilde = (1.0 - beta) * s.x_bar + beta * s.x;

  GradientSample gx = o.sample(GradKind::GradXPhi, s.x, y_next);
  GradientSample gf = o.sample(GradKind::GradF, s.x_tilde, y_next);
  Vector x_next = prox.step(p.g(), s.x, gx.value + gf.value, tau);

  if (s.hat) hat_sequence_step(s, prox, p.geom_y(), gx.noise + gf.noise, tau, gy.noise, alpha);

  s.x_bar = (1.0 - beta) * s.x_bar + beta * x_next;
  s.y_bar = (1.0 - beta) * s.y_bar + beta * y_next;
  s.gy_prev = std::move(gy.value);
  s.x = std::move(x_next);
  s.y = std::move(y_next);
  ++s.t;
}

std::vector<long> geometric_checkpoints(long T) {
  std::vector<long> out;
  for (long t = 3; t < T;) {
    out.push_back(t);
    t = std::max(t + 1, std::lround(1.4 * static_cast<double>(t)));
  }
  if (T >= 1) out.push_back(T);
  return out;
}

namespace {

enum class BoundMode { Convex, Rescaled };

RunResult run_impl(const SaddleProblem& p, StochasticOracle& o, const ScheduleParams& sched, long T,
                   const PrimalProx& prox, const Vector& x1, const Vector& y1, const RunOptions& opts,
                   BoundMode mode, double R) {
  if (T < 3) throw ConfigError("horizon T must be at least 3");
  if (&o.problem() != &p) throw ConfigError("oracle wraps a different problem");
  const auto start = std::chrono::steady_clock::now();

  std::vector<long> cps = opts.checkpoints.empty() ? geometric_checkpoints(T) : opts.checkpoints;
  std::sort(cps.begin(), cps.end());
  cps.erase(std::unique(cps.begin(), cps.end()), cps.end());
  cps.erase(std::remove_if(cps.begin(), cps.end(), [T](long c) { return c < 1 || c > T; }), cps.end());

  RunResult res;
  res.state = initial_state(p, x1, y1, opts.track_hat);
  res.record.algorithm = mode == BoundMode::Convex ? "spdhg" : "spdhg-rescaled";
  res.record.seed = o.model().seed;

  const GeometrySpec& gx = p.geom_x();
  const GeometrySpec& gy = p.geom_y();
  const bool finite_x = std::isfinite(gx.bregman_diameter);
  const bool finite_y = std::isfinite(gy.bregman_diameter);
  double traj_x = 0.0, traj_y = 0.0;
  auto track = [&](const IterateState& s) {
    if (!opts.trajectory_diameters) return;
    if (!finite_x) traj_x = std::max(traj_x, max_distance_from(gx, s.x));
    if (!finite_y) traj_y = std::max(traj_y, max_distance_from(gy, s.y));
  };
  track(res.state);

  const NoiseLevels levels = o.levels();
  auto record_row = [&](const IterateState& s) {
    CheckpointRow row;
    row.t = s.t;
    if (opts.gap) row.gap = opts.gap(s.x_bar, s.y_bar);
    row.calls = o.stats().calls;
    if (mode == BoundMode::Convex && s.t >= 3 && sched.provenance == ScheduleProvenance::Default) {
      const double ox = finite_x ? gx.bregman_diameter : (opts.trajectory_diameters ? traj_x : kInf);
      const double oy = finite_y ? gy.bregman_diameter : (opts.trajectory_diameters ? traj_y : kInf);
      row.omega_x = ox;
      row.omega_y = oy;
      if (std::isfinite(ox) && std::isfinite(oy))
        row.B_E = theoretical_bound_BE(p.constants(), levels, ox, oy, sched.rho, sched.rho_prime, s.t).B_E;
    }
    if (mode == BoundMode::Rescaled && s.t == T) {
      const double op = normalized_diameter(gx);
      row.omega_x = op;
      row.omega_y = gy.bregman_diameter;
      row.B_det = rescaled_bound_det(p.constants(), op, gy.bregman_diameter, R, T).B_det;
      if (sched.provenance == ScheduleProvenance::RescaledStochastic)
        row.B_var = rescaled_bound_var(levels, op, gy.bregman_diameter, R, T, sched.varsigma);
    }
    row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    res.record.rows.push_back(std::move(row));
  };

  std::size_t next = 0;
  if (next < cps.size() && cps[next] == 1) {
    record_row(res.state);
    ++next;
  }
  while (res.state.t < T) {
    spdhg_step(p, o, res.state, sched, prox);
    track(res.state);
    if (opts.on_step) opts.on_step(res.state);
    if (next < cps.size() && cps[next] == res.state.t) {
      record_row(res.state);
      ++next;
    }
  }
  res.x_bar = res.state.x_bar;
  res.y_bar = res.state.y_bar;
  return res;
}

}  // namespace

RunResult run_spdhg(const SaddleProblem& p, StochasticOracle& o, const ScheduleParams& sched, long T,
                    const RunOptions& opts) {
  const Vector x1 = opts.x1 ? *opts.x1 : p.geom_x().set.center_point();
  const Vector y1 = opts.y1 ? *opts.y1 : p.geom_y().set.center_point();
  return run_impl(p, o, sched, T, PrimalProx::plain(p.geom_x()), x1, y1, opts, BoundMode::Convex, 0.0);
}

RunResult run_spdhg_rescaled(const SaddleProblem& p, StochasticOracle& o, const VecRef& x0, double R,
                             const FeasibleSet& X_prime, long T, const ScheduleParams& sched,
                             const RunOptions& opts) {
  if (sched.horizon != 0 && sched.horizon != T) throw ConfigError("schedule horizon differs from T");
  if (!X_prime.contains(x0, 1e-9)) throw DomainError("starting point lies outside the constraint set");
  const PrimalProx prox = PrimalProx::rescaled_on(p.geom_x(), X_prime, x0, R);
  const Vector y1 = opts.y1 ? *opts.y1 : p.geom_y().set.center_point();
  return run_impl(p, o, sched, T, prox, Vector(x0), y1, opts, BoundMode::Rescaled, R);
}

}  // namespace saddlekit
