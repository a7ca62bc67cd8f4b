#include "saddlekit/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace saddlekit {
namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double sigma_for(const NoiseLevels& s, GradKind k) {
  switch (k) {
    case GradKind::GradF: return s.sigma_x_f;
    case GradKind::GradXPhi: return s.sigma_x_phi;
    case GradKind::GradYPhi: return s.sigma_y_phi;
  }
  return 0.0;
}

}  // namespace

NoiseModel NoiseModel::subgaussian(double sigma_x_f, double sigma_x_phi, double sigma_y_phi,
                                   std::uint64_t seed) {
  if (sigma_x_f < 0 || sigma_x_phi < 0 || sigma_y_phi < 0) throw ConfigError("noise levels must be nonnegative");
  return {NoiseKind::AdditiveSubGaussian, {sigma_x_f, sigma_x_phi, sigma_y_phi}, 0, seed};
}

NoiseModel NoiseModel::minibatch(Index batch_size, std::uint64_t seed) {
  if (batch_size < 1) throw ConfigError("batch size must be positive");
  return {NoiseKind::FiniteSumMinibatch, {}, batch_size, seed};
}

double OracleStats::second_moment(GradKind k) const {
  const int i = static_cast<int>(k);
  return calls[i] ? sum_sq_noise[i] / static_cast<double>(calls[i]) : 0.0;
}

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(0xd1b54a32d192ed03ULL * (stream + 1)));
}

double subgaussian_coordinate_scale(Index d) {
  if (d >= 2) return 1.0 / std::sqrt(2.0 * static_cast<double>(d));
  // d = 1: E exp(s^2 chi2_1) = (1 - 2 s^2)^(-1/2) needs s^2 well below 1/2.
  return std::sqrt(0.4 * (1.0 - std::exp(-2.0)));
}

Vector draw_subgaussian(const NormKind& primal_norm, Index dim, double sigma, std::mt19937_64& rng) {
  if (sigma == 0.0) return Vector::Zero(dim);
  std::normal_distribution<double> normal(0.0, 1.0);
  const bool matrix = primal_norm.tag == NormTag::SymmetricNuclear;
  Index n = 0, d = dim;
  if (matrix) {
    n = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(dim))));
    d = n * (n + 1) / 2;
  }
  const double scale = sigma * subgaussian_coordinate_scale(d);
  Vector delta(dim);
  for (int attempt = 0; attempt < 10000; ++attempt) {
    for (Index i = 0; i < dim; ++i) delta[i] = scale * normal(rng);
    if (matrix) {
      // (Z + Z')/2 with entries of scale s: ||.||_F^2 / s^2 is chi-square with n(n+1)/2 dof.
      Matrix z = to_matrix(delta, n);
      Matrix sym = 0.5 * (z + z.transpose());
      delta = to_vector(sym);
    }
    if (dual_norm(primal_norm, delta) <= 3.0 * sigma) return delta;
  }
  throw ConvergenceError("sub-Gaussian rejection sampler failed to accept a draw");
}

// ---------------------------------------------------------------------------

StochasticOracle::StochasticOracle(const SaddleProblem& p, NoiseModel model, bool diagnostic)
    : p_(&p), model_(model), diagnostic_(diagnostic) {
  if (model_.kind == NoiseKind::FiniteSumMinibatch) {
    if (p.num_components() < 1)
      throw ConfigError("mini-batch noise needs a problem with finite-sum structure");
    if (model_.batch_size < 1 || model_.batch_size > p.num_components())
      throw ConfigError("batch size must lie in [1, number of components]");
  }
  for (std::uint64_t s = 0; s < 3; ++s) streams_[s].seed(substream_seed(model_.seed, s));
}

bool StochasticOracle::deterministic() const {
  switch (model_.kind) {
    case NoiseKind::Deterministic: return true;
    case NoiseKind::AdditiveSubGaussian:
      return model_.sigma.sigma_x_f == 0 && model_.sigma.sigma_x_phi == 0 && model_.sigma.sigma_y_phi == 0;
    case NoiseKind::FiniteSumMinibatch: return model_.batch_size == p_->num_components();
  }
  return false;
}

NoiseLevels StochasticOracle::levels() const {
  return model_.kind == NoiseKind::AdditiveSubGaussian ? model_.sigma : NoiseLevels{};
}

Vector StochasticOracle::exact(GradKind which, const VecRef& x, const VecRef& y) const {
  switch (which) {
    case GradKind::GradF: return p_->grad_f(x);
    case GradKind::GradXPhi: return p_->grad_x_phi(x, y);
    case GradKind::GradYPhi: return p_->grad_y_phi(x, y);
  }
  return {};
}

Vector StochasticOracle::minibatch(GradKind which, const VecRef& x, const VecRef& y,
                                   std::mt19937_64& rng) const {
  const Index n = p_->num_components();
  const Index b = model_.batch_size;
  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  // Partial Fisher-Yates: first b entries form a uniform batch without replacement.
  for (Index i = 0; i < b; ++i) {
    std::uniform_int_distribution<Index> pick(i, n - 1);
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(pick(rng))]);
  }
  Vector sum;
  for (Index i = 0; i < b; ++i) {
    const Index j = idx[static_cast<std::size_t>(i)];
    Vector gi = which == GradKind::GradF      ? p_->component_grad_f(j, x)
                : which == GradKind::GradXPhi ? p_->component_grad_x_phi(j, x, y)
                                              : p_->component_grad_y_phi(j, x, y);
    if (i == 0) sum = std::move(gi); else sum += gi;
  }
  return sum / static_cast<double>(b);
}

GradientSample StochasticOracle::sample(GradKind which, const VecRef& x, const VecRef& y) {
  constexpr double kFeasTol = 1e-6;
  if (!p_->geom_x().set.contains(x, kFeasTol)) throw DomainError("oracle query: x is infeasible");
  if (which != GradKind::GradF && !p_->geom_y().set.contains(y, kFeasTol))
    throw DomainError("oracle query: y is infeasible");

  const int k = static_cast<int>(which);
  const GeometrySpec& space = which == GradKind::GradYPhi ? p_->geom_y() : p_->geom_x();
  GradientSample out;
  out.which = which;
  out.call_index = stats_.calls[k]++;

  Vector noise;
  switch (model_.kind) {
    case NoiseKind::Deterministic:
      out.value = exact(which, x, y);
      noise = Vector::Zero(out.value.size());
      break;
    case NoiseKind::AdditiveSubGaussian:
      out.value = exact(which, x, y);
      noise = draw_subgaussian(space.norm, out.value.size(), sigma_for(model_.sigma, which), streams_[k]);
      out.value += noise;
      break;
    case NoiseKind::FiniteSumMinibatch:
      out.value = minibatch(which, x, y, streams_[k]);
      noise = out.value - exact(which, x, y);
      break;
  }
  const double dn = dual_norm(space.norm, noise);
  stats_.sum_sq_noise[k] += dn * dn;
  if (diagnostic_) out.noise = std::move(noise);
  return out;
}

}  // namespace saddlekit
