#include "saddlekit/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <random>
#include <sstream>

#include "saddlekit/harness.hpp"
#include "saddlekit/reference.hpp"
#include "saddlekit/restart.hpp"
#include "saddlekit/spdhg.hpp"
#include "saddlekit/stopping.hpp"

namespace saddlekit::acceptance {
namespace {

// Pinned thresholds.
constexpr long kDominationHorizon = 5000;
constexpr double kDominationSecondsPerGame = 10.0;
constexpr int kScheduleDraws = 100;
constexpr long kScheduleTmax = 100000;
constexpr int kProxInstances = 200;
constexpr double kProxTol = 1e-7;
constexpr int kRescaledInstances = 20;
constexpr double kRescaledSeconds = 60.0;
constexpr double kRestartEpsilons[] = {1e-1, 1e-2, 1e-3};
constexpr int kStocSeeds = 20;
constexpr int kStocMinSuccess = 15;
constexpr double kStocSigma = 0.05;
constexpr double kStocEpsilon = 1e-2;
constexpr double kStocNu = 0.2;
constexpr double kStocSeconds = 300.0;
constexpr double kContainmentSlack = 1e-8;
constexpr double kNoiseSlope = -0.5;
constexpr double kNoiseSlopeTol = 0.1;
constexpr double kBoundSlope = -2.0;
constexpr double kBoundSlopeTol = 0.2;
constexpr int kStopQuadratics = 1000;
constexpr double kStopSlack = 1e-9;
constexpr int kLipschitzPairs = 100;
constexpr double kLipschitzTol = 1e-6;
constexpr long kNoiseSamples = 100000;
constexpr double kMomentSlack = 0.05;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}

double uniform(std::mt19937_64& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

long uniform_int(std::mt19937_64& rng, long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng); }

Vector gaussian(std::mt19937_64& rng, Index n, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = nd(rng);
  return v;
}

Vector random_simplex_point(std::mt19937_64& rng, Index n, double spread) {
  Vector w = gaussian(rng, n, spread).array().exp().matrix();
  return w / w.sum();
}

Matrix random_orthogonal(std::mt19937_64& rng, Index n) {
  Matrix G(n, n);
  for (Index j = 0; j < n; ++j) G.col(j) = gaussian(rng, n);
  Eigen::HouseholderQR<Matrix> qr(G);
  return qr.householderQ() * Matrix::Identity(n, n);
}

Matrix spd_with_range(std::mt19937_64& rng, Index n, double lo, double hi) {
  Vector ev(n);
  for (Index i = 0; i < n; ++i) ev(i) = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (n - 1);
  const Matrix U = random_orthogonal(rng, n);
  Matrix H = U * ev.asDiagonal() * U.transpose();
  return 0.5 * (H + H.transpose());
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

GapFn exact_gap(const ClosedFormInstance& p) {
  return [&p](const Vector& x, const Vector& y) { return p.duality_gap(x, y); };
}

// ---------------------------------------------------------------------------
// 1. Bound domination on matrix games
// ---------------------------------------------------------------------------

CriterionResult bound_domination() {
  CriterionResult r;
  std::ostringstream d;
  bool ok = true;
  std::mt19937_64 rng(11);
  struct Game {
    std::string name;
    Index n;
    std::uint64_t seed;
  };
  for (const Game& game : {Game{"2x2", 2, 0}, Game{"10x10", 10, 7}}) {
    const auto t0 = Clock::now();
    int rows = 0, bad = 0;
    double worst_ratio = 0.0;
    Vector x1 = game.n == 2 ? Vector{{0.8, 0.2}} : random_simplex_point(rng, game.n, 1.0);
    Vector y1 = game.n == 2 ? Vector{{0.3, 0.7}} : random_simplex_point(rng, game.n, 1.0);
    for (auto geo : {SimplexGeometry::Entropy, SimplexGeometry::Euclidean}) {
      const ClosedFormInstance p =
          game.n == 2 ? matching_pennies(geo) : random_matrix_game(game.n, game.n, game.seed, geo);
      StochasticOracle o(p, NoiseModel::deterministic());
      const ScheduleParams sched = default_schedule(p.constants(), {}, default_rho(p.geom_y().bregman_diameter),
                                                     default_rho_prime(p.geom_x().bregman_diameter));
      RunOptions ro;
      ro.x1 = x1;
      ro.y1 = y1;
      ro.gap = exact_gap(p);
      ro.trajectory_diameters = true;
      const RunResult run = run_spdhg(p, o, sched, kDominationHorizon, ro);
      for (const auto& row : run.record.rows) {
        if (row.t < 3) continue;
        ++rows;
        if (!row.gap || !row.B_E || *row.gap > *row.B_E) {
          ++bad;
          continue;
        }
        worst_ratio = std::max(worst_ratio, *row.gap / *row.B_E);
      }
    }
    const double secs = seconds_since(t0);
    const bool game_ok = bad == 0 && rows > 0 && secs < kDominationSecondsPerGame;
    ok = ok && game_ok;
    d << game.name << ": " << rows << " checkpoints, " << bad << " violations, max gap/B_E " << fmt(worst_ratio)
      << ", " << fmt(secs) << " s; ";
  }
  r.pass = ok;
  r.detail = d.str();
  return r;
}

// ---------------------------------------------------------------------------
// 2. Schedule conditions over random constants
// ---------------------------------------------------------------------------

CriterionResult schedule_conditions() {
  CriterionResult r;
  std::mt19937_64 rng(2);
  auto maybe = [&](double lo, double hi) {
    return uniform(rng, 0, 1) < 0.2 ? 0.0 : log_uniform(rng, lo, hi);
  };
  int checked = 0, violations = 0;
  std::string first;
  auto check = [&](const ScheduleParams& s, const ProblemConstants& k, const char* family) {
    const ConditionReport rep = verify_schedule(s, k, kScheduleTmax);
    ++checked;
    if (!rep.ok) {
      ++violations;
      if (first.empty() && rep.first_violation)
        first = std::string(family) + " t=" + std::to_string(rep.first_violation->t) + " " +
                condition_name(rep.first_violation->condition);
    }
  };
  for (int i = 0; i < kScheduleDraws; ++i) {
    ProblemConstants k;
    k.L = maybe(1e-3, 1e2);
    k.L_xx = maybe(1e-3, 1e2);
    k.L_yx = maybe(1e-3, 1e2);
    k.L_yy = maybe(1e-3, 1e2);
    k.mu = log_uniform(rng, 1e-2, 1e1);
    NoiseLevels s{maybe(1e-3, 1e1), maybe(1e-3, 1e1), maybe(1e-3, 1e1)};
    check(default_schedule(k, s, log_uniform(rng, 1e-2, 1e2), log_uniform(rng, 1e-2, 1e2)), k, "default");
    const double op = log_uniform(rng, 0.1, 10.0), oy = log_uniform(rng, 1e-2, 1e2), R = log_uniform(rng, 1e-2, 1e1);
    check(rescaled_schedule_det(k, op, oy, R, rescaled_horizon_det(k, op, oy, R)), k, "rescaled-det");
    const double vs = log_uniform(rng, 1e-4, 1.0 / 6.0);
    check(rescaled_schedule_stoc(k, s, op, oy, R, rescaled_horizon_stoc(k, s, op, oy, R, vs), vs), k,
          "rescaled-stoc");
  }
  r.pass = violations == 0;
  r.detail = std::to_string(checked) + " schedules up to t=" + std::to_string(kScheduleTmax) + ", " +
             std::to_string(violations) + " with violations" + (first.empty() ? "" : " (first: " + first + ")");
  return r;
}

// ---------------------------------------------------------------------------
// 3. Closed-form proxes against brute-force minimization
// ---------------------------------------------------------------------------

double max_abs_diff(const Vector& a, const Vector& b) { return (a - b).cwiseAbs().maxCoeff(); }

CriterionResult prox_equivalence() {
  CriterionResult r;
  std::mt19937_64 rng(3);
  std::ostringstream d;
  bool ok = true;
  auto report = [&](const char* name, double worst) {
    ok = ok && worst <= kProxTol;
    d << name << " " << fmt(worst) << "; ";
  };

  double worst = 0.0;
  for (int i = 0; i < kProxInstances; ++i) {
    const Index n = uniform_int(rng, 2, 100);
    const GeometrySpec g = simplex_entropy_geometry(n);
    const Vector u = random_simplex_point(rng, n, 1.0);
    const Vector v = gaussian(rng, n, log_uniform(rng, 1e-2, 3.0));
    const double lam = log_uniform(rng, 1e-2, 3.0);
    worst = std::max(worst, max_abs_diff(bregman_prox(g, u, v, lam), reference::prox(g, u, v, lam)));
  }
  report("simplex-entropy", worst);

  worst = 0.0;
  for (int i = 0; i < kProxInstances; ++i) {
    const Index n = uniform_int(rng, 2, 6);
    const GeometrySpec g = matrix_entropy_geometry(n);
    Matrix G(n, n);
    for (Index j = 0; j < n; ++j) G.col(j) = gaussian(rng, n);
    Matrix X = G * G.transpose() + 0.1 * Matrix::Identity(n, n);
    X /= X.trace();
    Matrix V(n, n);
    for (Index j = 0; j < n; ++j) V.col(j) = gaussian(rng, n, log_uniform(rng, 1e-2, 2.0));
    V = 0.5 * (V + V.transpose());
    const double lam = log_uniform(rng, 1e-2, 2.0);
    const Vector u = to_vector(X), v = to_vector(V);
    worst = std::max(worst, max_abs_diff(bregman_prox(g, u, v, lam), reference::prox(g, u, v, lam)));
  }
  report("matrix-entropy", worst);

  worst = 0.0;
  for (int i = 0; i < kProxInstances; ++i) {
    const Index n = uniform_int(rng, 2, 6);
    const GeometrySpec g = half_pnorm_geometry(uniform(rng, 1.1, 2.0), FeasibleSet::orthant(n));
    const Vector u = gaussian(rng, n).cwiseAbs();
    const Vector v = gaussian(rng, n, log_uniform(rng, 1e-2, 3.0));
    const double lam = log_uniform(rng, 1e-2, 3.0);
    worst = std::max(worst, max_abs_diff(bregman_prox(g, u, v, lam), reference::prox(g, u, v, lam)));
  }
  report("p-norm-orthant", worst);

  auto random_base = [&](Index n) {
    switch (uniform_int(rng, 0, 3)) {
      case 0: return FeasibleSet::full_space(n);
      case 1: return FeasibleSet::orthant(n);
      case 2: return FeasibleSet::simplex(n);
      default: return FeasibleSet::euclidean_ball(gaussian(rng, n), log_uniform(rng, 0.1, 3.0));
    }
  };

  worst = 0.0;
  for (int i = 0; i < kProxInstances; ++i) {
    const Index n = uniform_int(rng, 1, 20);
    const GeometrySpec g = euclidean_geometry(random_base(n));
    const Vector u = sample_point(g.set, rng);
    const Vector v = gaussian(rng, n, log_uniform(rng, 1e-2, 3.0));
    const double lam = log_uniform(rng, 1e-2, 3.0);
    worst = std::max(worst, max_abs_diff(bregman_prox(g, u, v, lam), reference::prox(g, u, v, lam)));
  }
  report("euclidean", worst);

  worst = 0.0;
  for (int i = 0; i < kProxInstances; ++i) {
    const Index n = uniform_int(rng, 1, 20);
    const FeasibleSet base = random_base(n);
    const Vector center = sample_point(base, rng);
    const double R = log_uniform(rng, 0.05, 3.0);
    const FeasibleSet cut = base.intersect(Ball{center, R / 2.0});
    const Vector v = gaussian(rng, n, log_uniform(rng, 1e-2, 3.0));
    const double lam = log_uniform(rng, 1e-2, 3.0);
    const RescaledDgf h{euclidean_geometry(base), center, R};
    const Vector lib = rescaled_prox(h, cut, center, v, lam);
    const Vector ref = reference::project_dykstra(cut, center - lam * v);
    worst = std::max(worst, max_abs_diff(lib, ref));
  }
  report("ball-cut", worst);

  r.pass = ok;
  r.detail = "max abs deviation per family over " + std::to_string(kProxInstances) + " instances: " + d.str();
  return r;
}

// ---------------------------------------------------------------------------
// 4. Rescaled subroutine on strongly convex quadratics
// ---------------------------------------------------------------------------

CriterionResult rescaled_guarantee() {
  CriterionResult r;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(4);
  int gap_fail = 0, dist_fail = 0;
  double worst_gap = 0.0, worst_dist = 0.0;
  long max_T = 0;
  for (int i = 0; i < kRescaledInstances; ++i) {
    QuadraticSaddleOptions opt;
    opt.dim_x = uniform_int(rng, 2, 6);
    opt.dim_y = uniform_int(rng, 2, 6);
    opt.mu = uniform(rng, 0.5, 2.0);
    opt.L = opt.mu * uniform(rng, 1.0, 4.0);
    opt.L_yx = uniform(rng, 0.2, 1.5);
    opt.L_yy = uniform(rng, 0.0, 1.0);
    opt.radius_x = uniform(rng, 1.0, 3.0);
    opt.radius_y = uniform(rng, 0.5, 2.0);
    opt.saddle_fraction = uniform(rng, 0.3, 0.8);
    opt.seed = 100 + i;
    const ClosedFormInstance p = make_quadratic_saddle(opt);
    const SaddlePoint& sp = *p.saddle_point();
    const Vector x0 = p.geom_x().set.center_point();
    const double R = 2.0 * (x0 - sp.x).norm();
    const double op = normalized_diameter(p.geom_x());
    const double oy = p.geom_y().bregman_diameter;
    const long T = rescaled_horizon_det(p.constants(), op, oy, R);
    max_T = std::max(max_T, T);
    StochasticOracle o(p, NoiseModel::deterministic());
    RunOptions ro;
    ro.checkpoints = {T};
    const RunResult run =
        run_spdhg_rescaled(p, o, x0, R, p.geom_x().set, T, rescaled_schedule_det(p.constants(), op, oy, R, T), ro);
    const double gap = p.duality_gap(run.x_bar, run.y_bar);
    const double dist = (run.x_bar - sp.x).norm();
    const double gap_cap = p.constants().mu * R * R / 16.0, dist_cap = R / (2.0 * std::sqrt(2.0));
    if (gap > gap_cap) ++gap_fail;
    if (dist > dist_cap) ++dist_fail;
    worst_gap = std::max(worst_gap, gap / gap_cap);
    worst_dist = std::max(worst_dist, dist / dist_cap);
  }
  const double secs = seconds_since(t0);
  r.pass = gap_fail == 0 && dist_fail == 0 && secs < kRescaledSeconds;
  r.detail = std::to_string(kRescaledInstances) + " instances, max gap/(mu R^2/16) " + fmt(worst_gap) +
             ", max dist/(R/2sqrt2) " + fmt(worst_dist) + ", failures " + std::to_string(gap_fail) + "/" +
             std::to_string(dist_fail) + ", longest T " + std::to_string(max_T) + ", " + fmt(secs) + " s";
  return r;
}

// ---------------------------------------------------------------------------
// 5. Deterministic restarts
// ---------------------------------------------------------------------------

CriterionResult deterministic_restart() {
  CriterionResult r;
  const ClosedFormInstance p = make_quadratic_saddle({});
  const Vector x1 = p.geom_x().set.center_point();
  const double U = norm_diameter(p.geom_x());
  std::ostringstream d;
  bool ok = true;
  std::vector<int> Ks;
  for (double eps : kRestartEpsilons) {
    RestartOptions ro;
    ro.gap = exact_gap(p);
    const RestartResult res = restart_deterministic(p, x1, U, eps, ro);
    const double gap = p.duality_gap(res.x, res.y);
    const double bound = restart_complexity_det(p.constants(), res.plan.omega_prime, res.plan.omega_y, U, eps);
    long expected_calls = 0;
    for (long T : res.plan.T) expected_calls += T - 1;
    bool calls_ok = true;
    for (long c : res.stats.calls) calls_ok = calls_ok && c == expected_calls;
    bool contraction = true;
    for (const auto& st : res.record.stages)
      contraction = contraction && st.gap && *st.gap <= p.constants().mu * st.R * st.R / 16.0;
    const long total = res.plan.total_iterations();
    ok = ok && gap <= eps && calls_ok && static_cast<double>(total) <= bound && contraction;
    Ks.push_back(res.plan.K);
    d << "eps " << eps << ": K " << res.plan.K << ", gap " << fmt(gap) << ", sum T_k " << total << " <= " << fmt(bound)
      << (calls_ok ? "" : ", call count mismatch") << (contraction ? "" : ", stage contraction failed") << "; ";
  }
  for (std::size_t i = 1; i < Ks.size(); ++i) {
    const int step = Ks[i] - Ks[i - 1];
    if (step != 3 && step != 4) ok = false;
    d << "K step " << step << "; ";
  }
  r.pass = ok;
  r.detail = d.str();
  return r;
}

// ---------------------------------------------------------------------------
// 6. Stochastic restarts
// ---------------------------------------------------------------------------

CriterionResult stochastic_restart() {
  CriterionResult r;
  const auto t0 = Clock::now();
  QuadraticSaddleOptions opt;
  opt.mu = 5.0;
  opt.L = 10.0;
  opt.L_yx = 1.0;
  opt.L_yy = 1.0;
  opt.radius_x = 1.0;
  opt.radius_y = 0.05;
  opt.seed = 6;
  const ClosedFormInstance p = make_quadratic_saddle(opt);
  const Vector x0 = p.geom_x().set.center_point();
  const double U = norm_diameter(p.geom_x());

  struct Outcome {
    double gap = 0.0;
    long total = 0;
    double bound = 0.0;
    bool calls_ok = true;
    bool contained = true;
  };
  auto run_seed = [&](std::uint64_t seed) {
    StochasticOracle o(p, NoiseModel::subgaussian(kStocSigma, kStocSigma, kStocSigma, seed));
    const RestartResult res = restart_stochastic(p, o, x0, U, kStocEpsilon, kStocNu);
    Outcome out;
    out.gap = p.duality_gap(res.x, res.y);
    out.total = res.plan.total_iterations();
    out.bound = restart_complexity_stoc(p.constants(), o.levels(), res.plan.omega_prime, res.plan.omega_y, U,
                                        kStocEpsilon, kStocNu);
    const long expected = out.total - static_cast<long>(res.plan.T.size());
    for (long c : res.stats.calls) out.calls_ok = out.calls_ok && c == expected;
    for (const auto& st : res.record.stages)
      out.contained = out.contained && st.max_center_distance <= st.R / 2.0 + kContainmentSlack;
    return out;
  };
  std::vector<std::future<Outcome>> jobs;
  for (int s = 0; s < kStocSeeds; ++s)
    jobs.push_back(std::async(std::launch::async, run_seed, static_cast<std::uint64_t>(s)));
  int success = 0;
  bool accounting = true;
  double worst_gap = 0.0;
  long total = 0;
  double bound = 0.0;
  for (auto& j : jobs) {
    const Outcome o = j.get();
    if (o.gap <= kStocEpsilon) ++success;
    accounting = accounting && o.calls_ok && o.contained && static_cast<double>(o.total) <= o.bound;
    worst_gap = std::max(worst_gap, o.gap);
    total = o.total;
    bound = o.bound;
  }
  const double secs = seconds_since(t0);
  r.pass = success >= kStocMinSuccess && accounting && secs < kStocSeconds;
  r.detail = std::to_string(success) + "/" + std::to_string(kStocSeeds) + " runs with gap <= " + fmt(kStocEpsilon) +
             " (worst " + fmt(worst_gap) + "), sum T_k " + std::to_string(total) + " <= " + fmt(bound) +
             (accounting ? "" : ", accounting or containment failed") + ", " + fmt(secs) + " s";
  return r;
}

// ---------------------------------------------------------------------------
// 7. Rate orders
// ---------------------------------------------------------------------------

CriterionResult rate_orders() {
  CriterionResult r;
  QuadraticSaddleOptions opt;
  opt.mu = 0.0;
  opt.L = 0.0;
  opt.L_yx = 0.5;
  opt.L_yy = 0.0;
  opt.radius_x = 1.0;
  opt.radius_y = 1.0;
  opt.seed = 7;
  const ClosedFormInstance p = make_quadratic_saddle(opt);
  constexpr long T = 100000;
  constexpr int seeds = 8;
  constexpr double sigma = 1.0;
  const std::vector<long> cps = geometric_checkpoints(T);
  std::vector<double> mean(cps.size(), 0.0);
  const ScheduleParams sched =
      default_schedule(p.constants(), {sigma, sigma, sigma}, default_rho(p.geom_y().bregman_diameter),
                        default_rho_prime(p.geom_x().bregman_diameter));
  std::vector<std::future<std::vector<double>>> jobs;
  for (int s = 0; s < seeds; ++s) {
    jobs.push_back(std::async(std::launch::async, [&, s] {
      StochasticOracle o(p, NoiseModel::subgaussian(sigma, sigma, sigma, 700 + s));
      RunOptions ro;
      ro.checkpoints = cps;
      ro.gap = exact_gap(p);
      const RunResult run = run_spdhg(p, o, sched, T, ro);
      std::vector<double> g;
      for (const auto& row : run.record.rows) g.push_back(*row.gap);
      return g;
    }));
  }
  for (auto& j : jobs) {
    const auto g = j.get();
    for (std::size_t i = 0; i < g.size() && i < mean.size(); ++i) mean[i] += g[i] / seeds;
  }
  std::vector<std::pair<double, double>> series;
  for (std::size_t i = 0; i < cps.size(); ++i)
    if (cps[i] >= 1000 && cps[i] <= T) series.emplace_back(static_cast<double>(cps[i]), mean[i]);
  const RateFit noisy = fit_rate(series);

  ProblemConstants k;
  k.L = 1.0;
  std::vector<std::pair<double, double>> bound;
  for (long t : cps)
    if (t >= 1000) bound.emplace_back(static_cast<double>(t), theoretical_bound_BE(k, {}, 1.0, 1.0, 1.0, 1.0, t).B_E);
  const RateFit det = fit_rate(bound);

  const bool noisy_ok = std::abs(noisy.slope - kNoiseSlope) <= kNoiseSlopeTol;
  const bool det_ok = std::abs(det.slope - kBoundSlope) <= kBoundSlopeTol;
  r.pass = noisy_ok && det_ok;
  r.detail = "noise-dominated gap slope " + fmt(noisy.slope) + " (r2 " + fmt(noisy.r2) + ", " +
             std::to_string(series.size()) + " points, " + std::to_string(seeds) + " seeds); L-only B_E slope " +
             fmt(det.slope);
  return r;
}

// ---------------------------------------------------------------------------
// 8. Gradient-mapping stopping certificate
// ---------------------------------------------------------------------------

CriterionResult gradient_mapping_certificate() {
  CriterionResult r;
  std::mt19937_64 rng(8);
  int fired = 0, counterexamples = 0;
  double worst_excess = -kInf;
  for (int i = 0; i < kStopQuadratics; ++i) {
    const Index n = uniform_int(rng, 1, 8);
    const double mu = log_uniform(rng, 1e-2, 1.0);
    const double L = mu * log_uniform(rng, 1.0, 100.0);
    const Matrix H = spd_with_range(rng, n, mu, L);
    const Vector e = gaussian(rng, n);
    const FeasibleSet set =
        i % 2 == 0 ? FeasibleSet::full_space(n) : FeasibleSet::euclidean_ball(Vector::Zero(n), uniform(rng, 0.2, 2.0));
    const GeometrySpec g = euclidean_geometry(set);
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(H);
    const double p_star = minimize_quadratic(set, H, eig, e);

    // Approximate minimizer by projected gradient, then a random perturbation.
    Vector u = set.center_point();
    for (int it = 0; it < 5000; ++it) u = project(set, u - (H * u + e) / L);
    u = project(set, u + gaussian(rng, n, log_uniform(rng, 1e-6, 1.0)));

    const double eps = log_uniform(rng, 1e-8, 1.0);
    const GradientMappingResult res = gradient_mapping_stop(g, H * u + e, u, SimpleFunction::zero(), 1.0 / L, mu, eps);
    if (!res.satisfied) continue;
    ++fired;
    const double value = 0.5 * res.u_plus.dot(H * res.u_plus) + e.dot(res.u_plus);
    const double excess = value - p_star - eps;
    worst_excess = std::max(worst_excess, excess);
    if (excess > kStopSlack) ++counterexamples;
  }
  r.pass = counterexamples == 0 && fired > 0;
  r.detail = std::to_string(kStopQuadratics) + " quadratics, criterion fired " + std::to_string(fired) +
             " times, counterexamples " + std::to_string(counterexamples) + ", max (P(u+) - P* - eps) " +
             fmt(worst_excess);
  return r;
}

// ---------------------------------------------------------------------------
// 9. Lipschitz continuity of the best response
// ---------------------------------------------------------------------------

CriterionResult best_response_lipschitz() {
  CriterionResult r;
  std::mt19937_64 rng(9);
  QuadraticSaddleOptions opt;
  opt.L_yx = 2.0;  // large enough coupling to activate the primal ball for some y
  const ClosedFormInstance p = make_quadratic_saddle(opt);
  const double mu = p.constants().mu, Lyx = p.constants().L_yx;
  const double value_tol = mu * kLipschitzTol * kLipschitzTol / 2.0;
  int bad = 0, boundary = 0;
  double worst_ratio = 0.0;
  for (int i = 0; i < kLipschitzPairs; ++i) {
    const Vector y = sample_point(p.geom_y().set, rng);
    const Vector y2 = i % 2 == 0 ? sample_point(p.geom_y().set, rng)
                                 : project(p.geom_y().set, y + gaussian(rng, y.size(), 1e-3));
    const Vector x = best_response_x(p, y, value_tol);
    const Vector x2 = best_response_x(p, y2, value_tol);
    const double lhs = (x - x2).norm();
    const double rhs = Lyx / mu * (y - y2).norm() + 2.0 * kLipschitzTol;
    if (lhs > rhs) ++bad;
    if (x.norm() > opt.radius_x - 1e-6 || x2.norm() > opt.radius_x - 1e-6) ++boundary;
    worst_ratio = std::max(worst_ratio, lhs / rhs);
  }
  r.pass = bad == 0;
  r.detail = std::to_string(kLipschitzPairs) + " pairs, " + std::to_string(bad) + " counterexamples, max lhs/rhs " +
             fmt(worst_ratio) + ", " + std::to_string(boundary) + " pairs touching the primal boundary";
  return r;
}

// ---------------------------------------------------------------------------
// 10. Oracle noise assumptions
// ---------------------------------------------------------------------------

struct MomentCheck {
  double max_mean_dev = 0.0;  // max |mean_i| / (5 sigma / sqrt N)
  double second = 0.0;        // E ||delta||_*^2 / sigma^2
  double expo = 0.0;          // E exp(||delta||_*^2 / sigma^2) / e
  bool ok() const { return max_mean_dev <= 1.0 && second <= 1.0 + kMomentSlack && expo <= 1.0 + kMomentSlack; }
};

template <class Draw>
MomentCheck moments(const NormKind& primal, Index dim, double sigma, Draw draw) {
  Vector sum = Vector::Zero(dim);
  double sq = 0.0, ex = 0.0;
  for (long i = 0; i < kNoiseSamples; ++i) {
    const Vector dlt = draw();
    sum += dlt;
    const double q = std::pow(dual_norm(primal, dlt), 2) / (sigma * sigma);
    sq += q;
    ex += std::exp(q);
  }
  const double N = static_cast<double>(kNoiseSamples);
  MomentCheck m;
  m.max_mean_dev = (sum / N).cwiseAbs().maxCoeff() / (5.0 * sigma / std::sqrt(N));
  m.second = sq / N;
  m.expo = ex / N / std::exp(1.0);
  return m;
}

CriterionResult oracle_assumptions() {
  CriterionResult r;
  std::ostringstream d;
  bool ok = true;
  auto note = [&](const std::string& name, const MomentCheck& m) {
    ok = ok && m.ok();
    d << name << " mean " << fmt(m.max_mean_dev) << " var " << fmt(m.second) << " exp " << fmt(m.expo) << "; ";
  };

  struct Case {
    std::string name;
    NormKind norm;
    Index dim;
  };
  std::mt19937_64 rng(10);
  for (const Case& c : {Case{"l2/d1", NormKind::l2(), 1}, Case{"l2/d5", NormKind::l2(), 5},
                        Case{"l1/d10", NormKind::l1(), 10}, Case{"nuclear/3x3", NormKind::nuclear(), 9}}) {
    const double sigma = 0.7;
    note(c.name, moments(c.norm, c.dim, sigma, [&] { return draw_subgaussian(c.norm, c.dim, sigma, rng); }));
  }

  // Oracle streams on an l1 game and an l2 quadratic, in diagnostic mode.
  const ClosedFormInstance game = random_matrix_game(10, 10, 3);
  const ClosedFormInstance quad = make_quadratic_saddle({});
  for (const ClosedFormInstance* p : {&game, &quad}) {
    const NoiseLevels lv{0.3, 0.5, 0.7};
    StochasticOracle o(*p, NoiseModel::subgaussian(lv.sigma_x_f, lv.sigma_x_phi, lv.sigma_y_phi, 42), true);
    const Vector x = p->geom_x().set.center_point(), y = p->geom_y().set.center_point();
    const std::string tag = p == &game ? "game" : "quadratic";
    note(tag + "/f", moments(p->geom_x().norm, p->dim_x(), lv.sigma_x_f,
                             [&] { return o.sample(GradKind::GradF, x, y).noise; }));
    note(tag + "/xphi", moments(p->geom_x().norm, p->dim_x(), lv.sigma_x_phi,
                                [&] { return o.sample(GradKind::GradXPhi, x, y).noise; }));
    note(tag + "/yphi", moments(p->geom_y().norm, p->dim_y(), lv.sigma_y_phi,
                                [&] { return o.sample(GradKind::GradYPhi, x, y).noise; }));
  }

  // Seed determinism.
  {
    StochasticOracle a(quad, NoiseModel::subgaussian(1, 1, 1, 5)), b(quad, NoiseModel::subgaussian(1, 1, 1, 5));
    const Vector x = quad.geom_x().set.center_point(), y = quad.geom_y().set.center_point();
    bool same = true;
    for (int i = 0; i < 1000; ++i)
      for (auto k : {GradKind::GradF, GradKind::GradXPhi, GradKind::GradYPhi})
        same = same && a.sample(k, x, y).value == b.sample(k, x, y).value;
    ok = ok && same;
    d << "seed determinism " << (same ? "ok" : "broken") << "; ";
  }

  // Minibatch unbiasedness and full-batch exactness.
  {
    QuadraticSaddleOptions opt;
    opt.n_components = 20;
    const ClosedFormInstance p = make_quadratic_saddle(opt);
    const Vector x = sample_point(p.geom_x().set, rng), y = sample_point(p.geom_y().set, rng);
    StochasticOracle o(p, NoiseModel::minibatch(4, 77));
    const Vector exact = p.grad_f(x);
    Vector sum = Vector::Zero(exact.size()), sq = Vector::Zero(exact.size());
    for (long i = 0; i < kNoiseSamples; ++i) {
      const Vector dlt = o.sample(GradKind::GradF, x, y).value - exact;
      sum += dlt;
      sq += dlt.cwiseAbs2();
    }
    const double N = static_cast<double>(kNoiseSamples);
    const Vector sd = (sq / N).cwiseSqrt();
    const double dev = ((sum / N).cwiseAbs().array() / (5.0 * sd.array() / std::sqrt(N))).maxCoeff();
    StochasticOracle full(p, NoiseModel::minibatch(20, 78));
    const double full_err = (full.sample(GradKind::GradXPhi, x, y).value - p.grad_x_phi(x, y)).cwiseAbs().maxCoeff();
    ok = ok && dev <= 1.0 && full_err <= 1e-12;
    d << "minibatch mean " << fmt(dev) << ", full batch error " << fmt(full_err);
  }
  r.pass = ok;
  r.detail = d.str();
  return r;
}

}  // namespace

std::string criterion_name(int id) {
  switch (id) {
    case 1: return "bound-domination";
    case 2: return "schedule-conditions";
    case 3: return "prox-equivalence";
    case 4: return "rescaled-guarantee";
    case 5: return "deterministic-restart";
    case 6: return "stochastic-restart";
    case 7: return "rate-orders";
    case 8: return "gradient-mapping-stop";
    case 9: return "best-response-lipschitz";
    case 10: return "oracle-assumptions";
  }
  throw ConfigError("no acceptance criterion " + std::to_string(id));
}

CriterionResult run_criterion(int id) {
  const std::string name = criterion_name(id);
  const auto t0 = Clock::now();
  CriterionResult r;
  try {
    switch (id) {
      case 1: r = bound_domination(); break;
      case 2: r = schedule_conditions(); break;
      case 3: r = prox_equivalence(); break;
      case 4: r = rescaled_guarantee(); break;
      case 5: r = deterministic_restart(); break;
      case 6: r = stochastic_restart(); break;
      case 7: r = rate_orders(); break;
      case 8: r = gradient_mapping_certificate(); break;
      case 9: r = best_response_lipschitz(); break;
      case 10: r = oracle_assumptions(); break;
    }
  } catch (const std::exception& e) {
    r.pass = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.id = id;
  r.name = name;
  r.seconds = seconds_since(t0);
  return r;
}

std::string format(const CriterionResult& r) {
  std::ostringstream os;
  os.precision(3);
  os << std::fixed << (r.pass ? "PASS" : "FAIL") << " " << r.id << " " << r.name << " (" << r.seconds
     << " s): " << r.detail;
  return os.str();
}

}  // namespace saddlekit::acceptance
