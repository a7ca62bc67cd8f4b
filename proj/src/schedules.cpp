#include "saddlekit/schedules.hpp"

#include <algorithm>
#include <cmath>

namespace saddlekit {
namespace {

// Product that treats 0 * inf as 0 (a vanishing constant kills an unbounded diameter).
double prod(double a, double b) { return a == 0.0 || b == 0.0 ? 0.0 : a * b; }

double safe_sqrt_prod(double a, double b) { return a == 0.0 || b == 0.0 ? 0.0 : std::sqrt(a * b); }

void require_positive(double v, const char* what) {
  if (!(v > 0.0)) throw ConfigError(std::string(what) + " must be positive");
}

long ceil_to_long(double v) {
  if (!std::isfinite(v) || v > 9.0e18) throw ConfigError("horizon overflows: " + std::to_string(v));
  return static_cast<long>(std::ceil(v));
}

double log_inv(double varsigma) {
  if (!(varsigma > 0.0 && varsigma < 1.0)) throw ConfigError("failure probability must lie in (0, 1)");
  return std::log(1.0 / varsigma);
}

// Compares a <= b (or a == b) with slack relative to the magnitudes involved.
bool leq(double a, double b, double scale) { return a <= b + 1e-12 * std::max(1.0, scale); }
bool approx_eq(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

std::string to_string(ScheduleProvenance p) {
  switch (p) {
    case ScheduleProvenance::Default: return "default";
    case ScheduleProvenance::RescaledDeterministic: return "rescaled-deterministic";
    case ScheduleProvenance::RescaledStochastic: return "rescaled-stochastic";
    case ScheduleProvenance::Custom: return "custom";
  }
  return "custom";
}

double default_rho(double omega_y) {
  return std::isfinite(omega_y) && omega_y > 0 ? 1.0 / (4.0 * std::sqrt(omega_y)) : 1.0;
}

double default_rho_prime(double omega_x) {
  return std::isfinite(omega_x) && omega_x > 0 ? 1.0 / std::sqrt(omega_x) : 1.0;
}

ScheduleParams default_schedule(const ProblemConstants& k, const NoiseLevels& s, double rho, double rho_prime) {
  require_positive(rho, "rho");
  require_positive(rho_prime, "rho'");
  ScheduleParams p;
  p.provenance = ScheduleProvenance::Default;
  p.rho = rho;
  p.rho_prime = rho_prime;
  const double sy = s.sigma_y_phi, sx = s.sigma_x_phi + s.sigma_x_f;
  p.theta = [](long t) { return static_cast<double>(t - 1) / static_cast<double>(t); };
  p.beta = [](long t) { return 2.0 / static_cast<double>(t + 1); };
  p.gamma = [](long t) { return static_cast<double>(t); };
  p.alpha = [k, sy, rho](long t) {
    return 1.0 / (16.0 * (k.L_yx + k.L_yy + rho * sy * std::sqrt(static_cast<double>(t))));
  };
  p.tau = [k, sx, rho_prime](long t) {
    const double td = static_cast<double>(t);
    return td / (2.0 * (2.0 * k.L + (k.L_xx + k.L_yx) * td + rho_prime * sx * std::pow(td, 1.5)));
  };
  return p;
}

ScheduleParams rescaled_schedule_det(const ProblemConstants& k, double omega_prime, double omega_y, double R,
                                     long T, std::optional<double> eta) {
  return rescaled_schedule_stoc(k, NoiseLevels{}, omega_prime, omega_y, R, T, 0.5, eta);
}

ScheduleParams rescaled_schedule_stoc(const ProblemConstants& k, const NoiseLevels& s, double omega_prime,
                                     double omega_y, double R, long T, double varsigma,
                                     std::optional<double> eta) {
  require_positive(omega_prime, "normalized diameter");
  require_positive(omega_y, "dual Bregman diameter");
  require_positive(R, "radius");
  if (!std::isfinite(omega_y)) throw ConfigError("rescaled schedules need a finite dual Bregman diameter");
  if (T < 3) throw ConfigError("horizon must be at least 3");
  const bool stochastic = s.sigma_x_f > 0 || s.sigma_x_phi > 0 || s.sigma_y_phi > 0;

  ScheduleParams p;
  p.provenance = stochastic ? ScheduleProvenance::RescaledStochastic : ScheduleProvenance::RescaledDeterministic;
  p.horizon = T;
  p.eta = eta ? *eta : (4.0 / R) * std::sqrt(omega_y / omega_prime);
  require_positive(p.eta, "eta");
  const double Td = static_cast<double>(T);
  double alpha_den = 16.0 * (k.L_yx / p.eta + k.L_yy);
  double tau_den = 4.0 * k.L + 2.0 * (k.L_xx + p.eta * k.L_yx) * Td;
  if (stochastic) {
    const double l1 = 1.0 + log_inv(varsigma);
    p.varsigma = varsigma;
    p.rho = std::sqrt(l1 / (2.0 * omega_prime * omega_y)) / (4.0 * R);
    p.rho_prime = std::sqrt(l1 / (omega_prime * omega_y)) / (8.0 * R);
    alpha_den += 16.0 * p.rho * s.sigma_y_phi * std::sqrt(Td);
    tau_den += p.rho_prime * (s.sigma_x_phi + s.sigma_x_f) * std::pow(Td, 1.5);
  }
  const double alpha = 1.0 / alpha_den;
  const double tau = 1.0 / tau_den;
  p.theta = [](long t) { return static_cast<double>(t - 1) / static_cast<double>(t); };
  p.beta = [](long t) { return 2.0 / static_cast<double>(t + 1); };
  p.gamma = [](long t) { return static_cast<double>(t); };
  p.alpha = [alpha](long) { return alpha; };
  p.tau = [tau](long t) { return static_cast<double>(t) * tau; };
  return p;
}

std::string condition_name(int c) {
  switch (c) {
    case 1: return "theta monotone in [0,1]";
    case 2: return "alpha_t theta_t <= alpha_{t-1}";
    case 3: return "gamma_t theta_t = gamma_{t-1}";
    case 4: return "gamma_{t-1}/beta_{t-1} = gamma_t (1/beta_t - 1)";
    case 5: return "gamma/tau nondecreasing";
    case 6: return "alpha_t <= 1/(2 L_yy)";
    case 7: return "L beta_t + L_xx - 1/(2 tau_t) + 4 alpha_t L_yx^2 <= 0";
    case 8: return "(1 + theta_t) L_yy - 1/(8 alpha_t) <= 0";
    default: return "unknown";
  }
}

ConditionReport verify_schedule(const ScheduleParams& s, const ProblemConstants& k, long T_max) {
  ConditionReport rep;
  if (s.horizon > 0) T_max = std::min(T_max, s.horizon);
  double th_prev = 0.0, be_prev = 2.0, al_prev = 1.0, ta_prev = 1.0, ga_prev = 0.0;
  auto fail = [&](long t, int c, double lhs, double rhs) {
    rep.ok = false;
    rep.first_violation = ConditionViolation{t, c, lhs, rhs};
    return rep;
  };
  for (long t = 1; t <= T_max; ++t) {
    const double th = s.theta(t), be = s.beta(t), al = s.alpha(t), ta = s.tau(t), ga = s.gamma(t);
    if (!(th >= 0.0 && th <= 1.0) || !leq(th_prev, th, 1.0)) return fail(t, 1, th_prev, th);
    if (!leq(prod(al, th), al_prev, al_prev)) return fail(t, 2, prod(al, th), al_prev);
    if (!approx_eq(ga * th, ga_prev)) return fail(t, 3, ga * th, ga_prev);
    if (!approx_eq(ga_prev / be_prev, ga * (1.0 / be - 1.0))) return fail(t, 4, ga_prev / be_prev, ga * (1.0 / be - 1.0));
    if (!leq(ga_prev / ta_prev, ga / ta, ga / ta)) return fail(t, 5, ga_prev / ta_prev, ga / ta);
    if (k.L_yy > 0 && !leq(al, 1.0 / (2.0 * k.L_yy), al)) return fail(t, 6, al, 1.0 / (2.0 * k.L_yy));
    {
      const double pos = k.L * be + k.L_xx + 4.0 * prod(al, k.L_yx * k.L_yx);
      const double neg = 1.0 / (2.0 * ta);
      if (!leq(pos, neg, pos + neg)) return fail(t, 7, pos, neg);
    }
    {
      const double pos = (1.0 + th) * k.L_yy;
      const double neg = 1.0 / (8.0 * al);
      if (!leq(pos, neg, pos + neg)) return fail(t, 8, pos, neg);
    }
    th_prev = th;
    be_prev = be;
    al_prev = al;
    ta_prev = ta;
    ga_prev = ga;
    rep.checked_up_to = t;
  }
  return rep;
}

// ---------------------------------------------------------------------------

BoundReport theoretical_bound_BE(const ProblemConstants& k, const NoiseLevels& s, double omega_x,
                                 double omega_y, double rho, double rho_prime, long T) {
  if (T < 3) throw ConfigError("bound requires T >= 3");
  require_positive(rho, "rho");
  require_positive(rho_prime, "rho'");
  const double Td = static_cast<double>(T);
  BoundTerms b;
  b.L_term = prod(16.0 * k.L, omega_x) / (Td * (Td - 1.0));
  b.Lxx_term = prod(8.0 * k.L_xx, omega_x) / Td;
  b.Lyx_term = (prod(8.0 * k.L_yx, omega_x) + prod(128.0 * k.L_yx, omega_y)) / Td;
  b.Lyy_term = prod(128.0 * k.L_yy, omega_y) / Td;
  if (s.sigma_y_phi > 0)
    b.noise_y_term = 8.0 * s.sigma_y_phi / std::sqrt(Td) * (1.0 / rho + prod(16.0 * rho, omega_y));
  const double sx = s.sigma_x_f + s.sigma_x_phi;
  if (sx > 0) b.noise_x_term = 8.0 * sx / std::sqrt(Td) * (1.0 / rho_prime + prod(rho_prime, omega_x));
  BoundReport r;
  r.terms = b;
  r.B_E = b.total();
  return r;
}

double high_probability_excess(const NoiseLevels& s, const Diameters& d, double rho, double rho_prime,
                               double varsigma, long T) {
  if (!(varsigma > 0.0 && varsigma <= 1.0 / 6.0)) throw ConfigError("varsigma must lie in (0, 1/6]");
  const double l = std::log(1.0 / varsigma);
  const double sq = std::sqrt(static_cast<double>(T));
  const double sx = s.sigma_x_f + s.sigma_x_phi;
  double out = 0.0;
  if (s.sigma_y_phi > 0) out += 8.0 * s.sigma_y_phi / sq * (l / rho + std::sqrt(l) * d.D_Y);
  if (sx > 0) out += 8.0 * sx / sq * (l / rho_prime + std::sqrt(l) * d.D_X);
  return out;
}

BoundReport rescaled_bound_det(const ProblemConstants& k, double omega_prime, double omega_y, double R, long T) {
  if (T < 3) throw ConfigError("bound requires T >= 3");
  const double Td = static_cast<double>(T);
  BoundTerms b;
  b.L_term = 16.0 * k.L * R * R * omega_prime / (Td * (Td - 1.0));
  b.Lxx_term = 8.0 * k.L_xx * R * R * omega_prime / (Td - 1.0);
  b.Lyx_term = 64.0 * k.L_yx * R * safe_sqrt_prod(omega_prime, omega_y) / (Td - 1.0);
  b.Lyy_term = prod(128.0 * k.L_yy, omega_y) / Td;
  BoundReport r;
  r.terms = b;
  r.B_det = b.total();
  return r;
}

double rescaled_bound_var(const NoiseLevels& s, double omega_prime, double omega_y, double R, long T,
                          double varsigma) {
  const double l = log_inv(varsigma);
  const double sq = std::sqrt(static_cast<double>(T));
  const double sx = s.sigma_x_f + s.sigma_x_phi;
  return 4.0 * sx * R / sq * (4.0 * std::sqrt((1.0 + l) * omega_prime) + 2.0 * std::sqrt(l)) +
         4.0 * s.sigma_y_phi / sq *
             (8.0 * std::sqrt(2.0 * (1.0 + l) * omega_y) + 2.0 * std::sqrt(l * omega_y));
}

long rescaled_horizon_det(const ProblemConstants& k, double omega_prime, double omega_y, double R) {
  require_positive(k.mu, "mu");
  require_positive(R, "radius");
  const double mu = k.mu;
  const double v = std::max({3.0, 64.0 * std::sqrt(k.L / mu * omega_prime), 1024.0 * k.L_xx / mu * omega_prime,
                             4096.0 * k.L_yx / (mu * R) * safe_sqrt_prod(omega_prime, omega_y),
                             prod(8192.0 * k.L_yy / (mu * R * R), omega_y)});
  return ceil_to_long(v);
}

long rescaled_horizon_stoc(const ProblemConstants& k, const NoiseLevels& s, double omega_prime, double omega_y,
                           double R, double varsigma) {
  require_positive(k.mu, "mu");
  require_positive(R, "radius");
  const double mu = k.mu;
  const double l = log_inv(varsigma);
  const double sx = s.sigma_x_f + s.sigma_x_phi;
  const double cx = 4.0 * std::sqrt((1.0 + l) * omega_prime) + 2.0 * std::sqrt(l);
  const double cy = 8.0 * std::sqrt(2.0 * (1.0 + l) * omega_y) + 2.0 * std::sqrt(l * omega_y);
  const double muR = mu * R, muR2 = mu * R * R;
  const double v = std::max({3.0, 64.0 * std::sqrt(k.L / mu * omega_prime), 2048.0 * k.L_xx / mu * omega_prime,
                             4096.0 * k.L_yx / muR * safe_sqrt_prod(omega_prime, omega_y),
                             prod(128.0 * 128.0 * k.L_yy / muR2, omega_y),
                             512.0 * 512.0 * sx * sx / (muR * muR) * cx * cx,
                             512.0 * 512.0 * s.sigma_y_phi * s.sigma_y_phi / (muR2 * muR2) * cy * cy});
  return ceil_to_long(v);
}

double restart_complexity_det(const ProblemConstants& k, double omega_prime, double omega_y, double U,
                              double epsilon) {
  require_positive(k.mu, "mu");
  require_positive(epsilon, "epsilon");
  const double mu = k.mu;
  const double stages = std::ceil(std::log2(mu * U * U / (4.0 * epsilon))) + 1.0;
  return (3.0 + 64.0 * std::sqrt(k.L / mu * omega_prime) + 1024.0 * k.L_xx / mu * omega_prime) * stages +
         8192.0 * k.L_yx / std::sqrt(mu * epsilon) * safe_sqrt_prod(omega_prime, omega_y) +
         prod(2048.0 * k.L_yy / epsilon, omega_y);
}

double restart_complexity_stoc(const ProblemConstants& k, const NoiseLevels& s, double omega_prime,
                               double omega_y, double U, double epsilon, double nu) {
  require_positive(k.mu, "mu");
  require_positive(epsilon, "epsilon");
  const double mu = k.mu;
  const double lg = std::log2(mu * U * U / (4.0 * epsilon));
  const double stages = std::ceil(lg) + 1.0;
  const double lnu = std::log(6.0 * (lg + 2.0) / nu);
  const double sx = s.sigma_x_f + s.sigma_x_phi;
  const double sy = s.sigma_y_phi;
  return (3.0 + 64.0 * std::sqrt(k.L / mu * omega_prime) + 2048.0 * k.L_xx / mu * omega_prime) * stages +
         256.0 * 256.0 * k.L_yx / std::sqrt(mu * epsilon) * safe_sqrt_prod(omega_prime, omega_y) +
         prod(64.0 * 64.0 * k.L_yy / epsilon, omega_y) +
         1024.0 * 1024.0 * sx * sx / (epsilon * mu) * ((4.0 * omega_prime + 1.0) * lnu + 4.0 * omega_prime) +
         1024.0 * 1024.0 * sy * sy / (epsilon * epsilon) * (1.0 + lnu) * omega_y;
}

}  // namespace saddlekit
