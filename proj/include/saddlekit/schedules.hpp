#pragma once

#include <functional>
#include <optional>
#include <string>

#include "saddlekit/oracles.hpp"
#include "saddlekit/problems.hpp"

namespace saddlekit {

enum class ScheduleProvenance { Default, RescaledDeterministic, RescaledStochastic, Custom };

std::string to_string(ScheduleProvenance p);

// Step-size sequences indexed by t >= 1. Rescaled schedules are tied to a
// fixed horizon T and are only meaningful for t <= horizon.
struct ScheduleParams {
  std::function<double(long)> theta;
  std::function<double(long)> beta;
  std::function<double(long)> alpha;
  std::function<double(long)> tau;
  std::function<double(long)> gamma;
  double rho = 1.0;
  double rho_prime = 1.0;
  double eta = 1.0;
  long horizon = 0;      // 0 when open-ended
  double varsigma = 0.0;  // failure probability of the rescaled stochastic schedule
  ScheduleProvenance provenance = ScheduleProvenance::Custom;
};

// Diameter-optimal coupling weights; 1.0 when the diameter is unknown or infinite.
double default_rho(double omega_y);
double default_rho_prime(double omega_x);

// theta_t = (t-1)/t, beta_t = 2/(t+1), gamma_t = t,
// alpha_t = 1 / (16 (L_yx + L_yy + rho sigma_y sqrt(t))),
// tau_t   = t / (2 (2L + (L_xx + L_yx) t + rho' (sigma_xPhi + sigma_xf) t^1.5)).
ScheduleParams default_schedule(const ProblemConstants& k, const NoiseLevels& s, double rho,
                                 double rho_prime);

// Constant alpha and tau_t = t tau over a fixed horizon T with
// eta = (4/R) sqrt(Omega_Y / Omega') unless overridden.
ScheduleParams rescaled_schedule_det(const ProblemConstants& k, double omega_prime, double omega_y, double R,
                                     long T, std::optional<double> eta = std::nullopt);

// As above with the noise-dependent terms and rho, rho' set from varsigma.
ScheduleParams rescaled_schedule_stoc(const ProblemConstants& k, const NoiseLevels& s, double omega_prime,
                                     double omega_y, double R, long T, double varsigma,
                                     std::optional<double> eta = std::nullopt);

struct ConditionViolation {
  long t = 0;
  int condition = 0;  // 1..8 in the order listed by condition_name
  double lhs = 0.0;
  double rhs = 0.0;
};

struct ConditionReport {
  bool ok = true;
  long checked_up_to = 0;
  std::optional<ConditionViolation> first_violation;
};

std::string condition_name(int condition);

// Checks, for t = 1..T_max, with theta_0 = 0, beta_0 = 2, alpha_0 = tau_0 = 1, gamma_0 = 0:
//  1. 0 <= theta_t <= 1 and theta_{t-1} <= theta_t
//  2. alpha_t theta_t <= alpha_{t-1}
//  3. gamma_t theta_t = gamma_{t-1}
//  4. gamma_{t-1} / beta_{t-1} = gamma_t (1/beta_t - 1)
//  5. gamma_{t-1} / tau_{t-1} <= gamma_t / tau_t
//  6. alpha_t <= 1 / (2 L_yy)
//  7. L beta_t + L_xx - 1/(2 tau_t) + 4 alpha_t L_yx^2 <= 0
//  8. (1 + theta_t) L_yy - 1/(8 alpha_t) <= 0
ConditionReport verify_schedule(const ScheduleParams& sched, const ProblemConstants& k, long T_max);

// ---------------------------------------------------------------------------
// Bounds
// ---------------------------------------------------------------------------

struct BoundTerms {
  double L_term = 0.0;
  double Lxx_term = 0.0;
  double Lyx_term = 0.0;
  double Lyy_term = 0.0;
  double noise_y_term = 0.0;
  double noise_x_term = 0.0;

  double total() const { return L_term + Lxx_term + Lyx_term + Lyy_term + noise_y_term + noise_x_term; }
};

struct BoundReport {
  double B_E = 0.0;
  double B_det = 0.0;
  double B_var = 0.0;
  BoundTerms terms;
};

// Expected-gap bound of the default schedule after T - 1 steps (T >= 3).
BoundReport theoretical_bound_BE(const ProblemConstants& k, const NoiseLevels& s, double omega_x,
                                 double omega_y, double rho, double rho_prime, long T);

// Extra high-probability terms (probability >= 1 - 6 varsigma) added to B_E.
double high_probability_excess(const NoiseLevels& s, const Diameters& d, double rho, double rho_prime,
                               double varsigma, long T);

// Deterministic bound of the rescaled subroutine.
BoundReport rescaled_bound_det(const ProblemConstants& k, double omega_prime, double omega_y, double R, long T);

// Noise part of the rescaled subroutine's high-probability bound.
double rescaled_bound_var(const NoiseLevels& s, double omega_prime, double omega_y, double R, long T,
                          double varsigma);

// Smallest admissible horizons of the rescaled subroutine.
long rescaled_horizon_det(const ProblemConstants& k, double omega_prime, double omega_y, double R);
long rescaled_horizon_stoc(const ProblemConstants& k, const NoiseLevels& s, double omega_prime, double omega_y,
                           double R, double varsigma);

// Closed-form totals of stage lengths for the restart schemes.
double restart_complexity_det(const ProblemConstants& k, double omega_prime, double omega_y, double U,
                              double epsilon);
double restart_complexity_stoc(const ProblemConstants& k, const NoiseLevels& s, double omega_prime,
                               double omega_y, double U, double epsilon, double nu);

}  // namespace saddlekit
