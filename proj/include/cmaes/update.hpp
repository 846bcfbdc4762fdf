#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "cmaes/distribution.hpp"
#include "cmaes/hyperparams.hpp"

namespace cmaes {

/// Parameters a tell would commit, computed without touching the state.
struct CmaUpdate {
  Vector mean;
  double sigma = 0.0;
  Matrix cov;
  EvolutionPaths paths;
  bool h_sigma = true;
  double best_value = 0.0;
  Vector best_x;
};

inline void validate_batch(std::span<const EvaluatedSolution> solutions, const HyperParams& hp) {
  if (static_cast<int>(solutions.size()) != hp.lambda)
    throw ValidationError("tell expects exactly " + std::to_string(hp.lambda) + " solutions, got " +
                          std::to_string(solutions.size()));
  for (const auto& s : solutions) {
    if (s.x.size() != hp.dim)
      throw ValidationError("solution has dimension " + std::to_string(s.x.size()) + ", expected " +
                            std::to_string(hp.dim));
    if (std::isnan(s.value)) throw ValidationError("objective value is NaN");
    if (!std::isfinite(s.value)) throw ValidationError("objective value is not finite");
    if (!s.x.allFinite()) throw ValidationError("solution contains non-finite coordinates");
  }
}

/// Indices of `solutions` in ascending order of value; ties keep submission order.
inline std::vector<int> rank_order(std::span<const EvaluatedSolution> solutions) {
  std::vector<int> order(solutions.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return solutions[a].value < solutions[b].value; });
  return order;
}

/// One generation of the rank-based update: evolution paths, mean, CSA step
/// size and the rank-one plus active rank-mu covariance update.
inline CmaUpdate compute_update(DistributionState& state, const EvolutionPaths& paths,
                                const HyperParams& hp,
                                std::span<const EvaluatedSolution> solutions) {
  validate_batch(solutions, hp);
  const int d = hp.dim;
  const EigenCache& eig = state.decomposed();
  const Matrix inv_sqrt_c = eig.inv_sqrt();

  const std::vector<int> order = rank_order(solutions);
  Matrix ys(d, hp.lambda);
  for (int i = 0; i < hp.lambda; ++i)
    ys.col(i) = (solutions[order[i]].x - state.mean) / state.sigma;

  const Vector dy = ys.leftCols(hp.mu) * hp.weights.head(hp.mu);

  CmaUpdate up;
  up.best_value = solutions[order[0]].value;
  up.best_x = solutions[order[0]].x;

  up.paths.p_sigma = (1.0 - hp.c_sigma) * paths.p_sigma +
                     std::sqrt(hp.c_sigma * (2.0 - hp.c_sigma) * hp.mu_w) * (inv_sqrt_c * dy);
  const double norm_ps = up.paths.p_sigma.norm();
  const double chi_n = expected_norm(d);
  const double next_gen = static_cast<double>(state.generation + 1);
  const double ps_scale = std::sqrt(1.0 - std::pow(1.0 - hp.c_sigma, 2.0 * next_gen));
  up.h_sigma = norm_ps / (ps_scale * chi_n) < 1.4 + 2.0 / (d + 1.0);
  const double h = up.h_sigma ? 1.0 : 0.0;

  up.paths.p_c = (1.0 - hp.c_c) * paths.p_c + h * std::sqrt(hp.c_c * (2.0 - hp.c_c) * hp.mu_w) * dy;

  Vector w_circ = hp.weights;
  for (int i = 0; i < hp.lambda; ++i) {
    if (hp.weights[i] >= 0.0) continue;
    const double n2 = (inv_sqrt_c * ys.col(i)).squaredNorm();
    // y = 0 contributes a zero outer product whatever the rescaling.
    w_circ[i] = n2 > 0.0 ? hp.weights[i] * d / n2 : 0.0;
  }
  const Matrix rank_one = up.paths.p_c * up.paths.p_c.transpose();
  const Matrix rank_mu = ys * w_circ.asDiagonal() * ys.transpose();
  const double weight_sum = hp.weights.sum();

  up.cov = (1.0 + (1.0 - h) * hp.c_1 * hp.c_c * (2.0 - hp.c_c)) * state.cov +
           hp.c_1 * (rank_one - state.cov) + hp.c_mu * (rank_mu - weight_sum * state.cov);
  up.cov = (0.5 * (up.cov + up.cov.transpose())).eval();

  up.mean = state.mean + hp.c_m * state.sigma * dy;
  up.sigma = state.sigma * std::exp((hp.c_sigma / hp.d_sigma) * (norm_ps / chi_n - 1.0));

  if (!up.mean.allFinite() || !up.cov.allFinite() || !up.paths.p_sigma.allFinite() ||
      !up.paths.p_c.allFinite())
    throw NumericalError("distribution update produced non-finite parameters");
  if (!std::isfinite(up.sigma) || !(up.sigma > 0.0))
    throw NumericalError("step size left the positive finite range");
  return up;
}

}  // namespace cmaes
