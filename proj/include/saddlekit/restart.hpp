#pragma once

#include <optional>
#include <vector>

#include "saddlekit/spdhg.hpp"

namespace saddlekit {

struct RestartPlan {
  bool stochastic = false;
  double U = 0.0;
  double epsilon = 0.0;
  double nu = 1.0;
  int K = 0;
  double varsigma = 0.0;   // nu / (6K); stochastic plans only
  double omega_prime = 0.0;
  double omega_y = 0.0;
  std::vector<double> R;   // R_k = 2^{(3-k)/2} U
  std::vector<long> T;     // stage lengths

  long total_iterations() const;
};

// K = ceil(max{0, log2(mu U^2 / (4 eps))}) + 1 with the stage radii and lengths.
// Rejects eps > mu U^2 / 4.
RestartPlan plan_restart(const ProblemConstants& k, const NoiseLevels& s, double omega_prime, double omega_y,
                         double U, double epsilon, std::optional<double> nu = std::nullopt);

struct RestartOptions {
  GapFn gap;  // evaluated at each stage output when set
  bool record_checkpoints = false;
  std::optional<Vector> y1;  // default: center of the dual set, every stage
};

struct RestartResult {
  Vector x;
  Vector y;
  RestartPlan plan;
  RunRecord record;
  OracleStats stats;
};

RestartResult restart_deterministic(const SaddleProblem& p, const VecRef& x1, double U, double epsilon,
                                    const RestartOptions& opts = {});

// Stage k is restricted to X cut by the ball B(x_k, R_k / 2). Needs the
// squared Euclidean primal DGF.
RestartResult restart_stochastic(const SaddleProblem& p, StochasticOracle& o, const VecRef& x0, double U,
                                 double epsilon, double nu, const RestartOptions& opts = {});

}  // namespace saddlekit
