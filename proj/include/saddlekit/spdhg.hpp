#pragma once

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "saddlekit/oracles.hpp"
#include "saddlekit/problems.hpp"
#include "saddlekit/schedules.hpp"

namespace saddlekit {

struct HatIterates {
  Vector x_hat;
  Vector y_hat;
};

struct IterateState {
  Vector x, y;
  Vector x_bar, y_bar;
  Vector x_tilde;
  Vector s;        // relaxed dual gradient used by the most recent dual step
  Vector gy_prev;  // dual gradient draw at (x^{t-1}, y^{t-1}); empty at t = 1
  long t = 1;
  std::optional<HatIterates> hat;
};

// Primal prox rule: the geometry's own Bregman distance on its set, or a
// rescaled distance centered at the first iterate.
struct PrimalProx {
  GeometrySpec geom;
  std::optional<RescaledDgf> rescaled;

  static PrimalProx plain(const GeometrySpec& g) { return {g, std::nullopt}; }
  static PrimalProx rescaled_on(const GeometrySpec& base, const FeasibleSet& set, const VecRef& center, double R);

  Vector step(const SimpleFunction& g, const VecRef& x_ref, const VecRef& v, double lambda) const;
};

IterateState initial_state(const SaddleProblem& p, const VecRef& x1, const VecRef& y1, bool track_hat = false);

// One iteration: draws grad_y Phi at (x^t, y^t), relaxes it against the
// previous draw, then dual prox ascent, interpolation, primal prox descent and
// averaging. Exactly one call per gradient kind.
void spdhg_step(const SaddleProblem& p, StochasticOracle& o, IterateState& s, const ScheduleParams& sched,
                const PrimalProx& prox);

// Auxiliary noise-driven sequences:
//   x_hat+ = argmin -<noise_x, x> + D(x, x_hat) / tau_t,
//   y_hat+ = argmin -<noise_y, y> + D(y, y_hat) / alpha_t.
void hat_sequence_step(IterateState& s, const PrimalProx& prox, const GeometrySpec& geom_y, const VecRef& noise_x,
                       double tau_t, const VecRef& noise_y, double alpha_t);

// ---------------------------------------------------------------------------
// Runs and telemetry
// ---------------------------------------------------------------------------

struct CheckpointRow {
  long t = 0;
  std::optional<double> gap;
  std::optional<double> B_E;
  std::optional<double> B_det;
  std::optional<double> B_var;
  std::array<long, 3> calls{0, 0, 0};
  double wall_seconds = 0.0;
  // Diameters used for B_E: the geometry's, or the running sup of D(., x^t).
  std::optional<double> omega_x;
  std::optional<double> omega_y;

  bool operator==(const CheckpointRow&) const = default;
};

struct StageSummary {
  int k = 0;
  double R = 0.0;
  long T = 0;
  std::optional<double> gap;
  double max_center_distance = 0.0;  // max over stage iterates of ||x - x_k||
  std::array<long, 3> calls{0, 0, 0};

  bool operator==(const StageSummary&) const = default;
};

struct RunRecord {
  std::string algorithm;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> config;
  std::vector<CheckpointRow> rows;
  std::vector<StageSummary> stages;
  std::map<std::string, bool> verdicts;

  bool operator==(const RunRecord&) const = default;
};

using GapFn = std::function<double(const Vector&, const Vector&)>;

struct RunOptions {
  std::optional<Vector> x1;  // default: center of the primal set
  std::optional<Vector> y1;  // default: center of the dual set
  std::vector<long> checkpoints;  // default: geometric_checkpoints(T)
  GapFn gap;                      // exact gap oracle; rows carry no gap if unset
  bool track_hat = false;         // requires a diagnostic oracle
  // Track sup_u D(u, x^t), sup_v D(v, y^t) along the run and use them for B_E
  // when the geometry's diameter is infinite.
  bool trajectory_diameters = false;
  std::function<void(const IterateState&)> on_step;
};

struct RunResult {
  Vector x_bar;
  Vector y_bar;
  IterateState state;
  RunRecord record;
};

// 3, 4, 6, 8, 11, ... (factor 1.4, at least +1), capped by and ending at T.
std::vector<long> geometric_checkpoints(long T);

// T - 1 iterations of the algorithm with a schedule on the plain geometry.
RunResult run_spdhg(const SaddleProblem& p, StochasticOracle& o, const ScheduleParams& sched, long T,
                    const RunOptions& opts = {});

// Fixed-horizon run with the rescaled primal distance centered at x0 with radius
// R over the constraint set X' (a subset of the primal set).
RunResult run_spdhg_rescaled(const SaddleProblem& p, StochasticOracle& o, const VecRef& x0, double R,
                             const FeasibleSet& X_prime, long T, const ScheduleParams& sched,
                             const RunOptions& opts = {});

}  // namespace saddlekit
