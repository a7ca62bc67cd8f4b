#include "saddlekit/restart.hpp"

#include <cmath>
#include <numeric>

namespace saddlekit {

long RestartPlan::total_iterations() const { return std::accumulate(T.begin(), T.end(), 0L); }

RestartPlan plan_restart(const ProblemConstants& k, const NoiseLevels& s, double omega_prime, double omega_y,
                         double U, double epsilon, std::optional<double> nu) {
  if (!(k.mu > 0)) throw ConfigError("restarts need mu > 0");
  if (!(U > 0)) throw ConfigError("diameter estimate U must be positive");
  if (!(epsilon > 0)) throw ConfigError("epsilon must be positive");
  if (epsilon > k.mu * U * U / 4.0) throw ConfigError("epsilon must not exceed mu U^2 / 4");
  if (!std::isfinite(omega_y)) throw ConfigError("restarts need a finite dual Bregman diameter");
  RestartPlan plan;
  plan.stochastic = nu.has_value();
  plan.U = U;
  plan.epsilon = epsilon;
  plan.omega_prime = omega_prime;
  plan.omega_y = omega_y;
  plan.K = static_cast<int>(std::ceil(std::max(0.0, std::log2(k.mu * U * U / (4.0 * epsilon))))) + 1;
  if (plan.stochastic) {
    if (!(*nu > 0.0 && *nu <= 1.0)) throw ConfigError("nu must lie in (0, 1]");
    plan.nu = *nu;
    plan.varsigma = *nu / (6.0 * plan.K);
  }
  for (int i = 1; i <= plan.K; ++i) {
    const double R = std::pow(2.0, (3.0 - i) / 2.0) * U;
    plan.R.push_back(R);
    plan.T.push_back(plan.stochastic ? rescaled_horizon_stoc(k, s, omega_prime, omega_y, R, plan.varsigma)
                                     : rescaled_horizon_det(k, omega_prime, omega_y, R));
  }
  return plan;
}

namespace {

RestartResult run_stages(const SaddleProblem& p, StochasticOracle& o, const VecRef& x0, const RestartPlan& plan,
                         bool cut_stages, const RestartOptions& opts) {
  const NoiseLevels levels = o.levels();
  RestartResult res;
  res.plan = plan;
  res.record.algorithm = plan.stochastic ? "restart-stoc" : "restart-det";
  res.record.seed = o.model().seed;
  Vector xk = x0;
  Vector yk;
  for (int k = 1; k <= plan.K; ++k) {
    const double R = plan.R[k - 1];
    const long T = plan.T[k - 1];
    const ScheduleParams sched = plan.stochastic
                                     ? rescaled_schedule_stoc(p.constants(), levels, plan.omega_prime,
                                                             plan.omega_y, R, T, plan.varsigma)
                                     : rescaled_schedule_det(p.constants(), plan.omega_prime, plan.omega_y, R, T);
    const FeasibleSet X_k = cut_stages ? p.geom_x().set.intersect(Ball{xk, R / 2.0}) : p.geom_x().set;

    StageSummary st;
    st.k = k;
    st.R = R;
    st.T = T;
    const auto before = o.stats().calls;
    RunOptions ro;
    ro.y1 = opts.y1;
    if (!opts.record_checkpoints) ro.checkpoints = {T};
    const Vector center = xk;
    ro.on_step = [&st, &center](const IterateState& s) {
      st.max_center_distance = std::max(st.max_center_distance, (s.x - center).norm());
    };
    RunResult run = run_spdhg_rescaled(p, o, xk, R, X_k, T, sched, ro);
    for (int i = 0; i < 3; ++i) st.calls[i] = o.stats().calls[i] - before[i];
    xk = run.x_bar;
    yk = run.y_bar;
    if (opts.gap) st.gap = opts.gap(xk, yk);
    for (auto& row : run.record.rows) res.record.rows.push_back(row);
    res.record.stages.push_back(st);
  }
  res.x = xk;
  res.y = yk;
  res.stats = o.stats();
  return res;
}

}  // namespace

RestartResult restart_deterministic(const SaddleProblem& p, const VecRef& x1, double U, double epsilon,
                                    const RestartOptions& opts) {
  const RestartPlan plan = plan_restart(p.constants(), NoiseLevels{}, normalized_diameter(p.geom_x()),
                                        p.geom_y().bregman_diameter, U, epsilon);
  StochasticOracle o(p, NoiseModel::deterministic());
  return run_stages(p, o, x1, plan, false, opts);
}

RestartResult restart_stochastic(const SaddleProblem& p, StochasticOracle& o, const VecRef& x0, double U,
                                 double epsilon, double nu, const RestartOptions& opts) {
  if (p.geom_x().dgf != DgfKind::SquaredEuclidean)
    throw UnsupportedGeometry("stochastic restarts need the squared Euclidean primal DGF");
  const RestartPlan plan = plan_restart(p.constants(), o.levels(), normalized_diameter(p.geom_x()),
                                        p.geom_y().bregman_diameter, U, epsilon, nu);
  return run_stages(p, o, x0, plan, true, opts);
}

}  // namespace saddlekit
