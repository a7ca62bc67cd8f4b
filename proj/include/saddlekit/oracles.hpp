#pragma once

#include <array>
#include <cstdint>
#include <random>

#include "saddlekit/problems.hpp"

namespace saddlekit {

enum class GradKind { GradF = 0, GradXPhi = 1, GradYPhi = 2 };

enum class NoiseKind { Deterministic, AdditiveSubGaussian, FiniteSumMinibatch };

struct NoiseLevels {
  double sigma_x_f = 0.0;
  double sigma_x_phi = 0.0;
  double sigma_y_phi = 0.0;
};

struct NoiseModel {
  NoiseKind kind = NoiseKind::Deterministic;
  NoiseLevels sigma;
  Index batch_size = 0;  // FiniteSumMinibatch
  std::uint64_t seed = 0;

  static NoiseModel deterministic() { return {}; }
  static NoiseModel subgaussian(double sigma_x_f, double sigma_x_phi, double sigma_y_phi, std::uint64_t seed);
  static NoiseModel minibatch(Index batch_size, std::uint64_t seed);
};

struct GradientSample {
  Vector value;
  Vector noise;  // value - exact gradient; empty unless the oracle is in diagnostic mode
  GradKind which = GradKind::GradF;
  long call_index = 0;
};

struct OracleStats {
  std::array<long, 3> calls{0, 0, 0};
  std::array<double, 3> sum_sq_noise{0.0, 0.0, 0.0};  // sum of ||delta||_*^2

  long count(GradKind k) const { return calls[static_cast<int>(k)]; }
  long total() const { return calls[0] + calls[1] + calls[2]; }
  double second_moment(GradKind k) const;
};

// splitmix64 finalizer applied to (seed, stream); distinct streams give
// statistically independent mt19937_64 seeds.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream);

// Per-coordinate scale factor s(d) so that N(0, (s sigma)^2 I_d) keeps
// E exp(||delta||^2 / sigma^2) below e; equals 1/sqrt(2d) for d >= 2.
double subgaussian_coordinate_scale(Index d);

// Symmetric noise truncated to ||delta||_* <= 3 sigma in the given dual norm.
// Spectral-norm noise is a symmetric matrix stored column-major.
Vector draw_subgaussian(const NormKind& primal_norm, Index dim, double sigma, std::mt19937_64& rng);

// Single-owner stochastic first-order oracle for a problem.
class StochasticOracle {
 public:
  StochasticOracle(const SaddleProblem& p, NoiseModel model, bool diagnostic = false);

  GradientSample sample(GradKind which, const VecRef& x, const VecRef& y);

  const OracleStats& stats() const { return stats_; }
  const NoiseModel& model() const { return model_; }
  const SaddleProblem& problem() const { return *p_; }
  bool diagnostic() const { return diagnostic_; }
  bool deterministic() const;
  NoiseLevels levels() const;

 private:
  Vector exact(GradKind which, const VecRef& x, const VecRef& y) const;
  Vector minibatch(GradKind which, const VecRef& x, const VecRef& y, std::mt19937_64& rng) const;

  const SaddleProblem* p_;
  NoiseModel model_;
  bool diagnostic_;
  OracleStats stats_;
  std::array<std::mt19937_64, 3> streams_;
};

}  // namespace saddlekit
