#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "cmaes/errors.hpp"
#include "cmaes/types.hpp"

namespace cmaes {

/// Strategy constants. `weights` has one entry per population member; the
/// first `mu` are positive and sum to one, the tail may be negative.
struct HyperParams {
  int dim = 0;
  int lambda = 0;
  int mu = 0;
  Vector weights;
  double mu_w = 0.0;
  double c_sigma = 0.0;
  double d_sigma = 0.0;
  double c_c = 0.0;
  double c_1 = 0.0;
  double c_mu = 0.0;
  double c_m = 1.0;

  /// Throws ValidationError naming the first violated invariant.
  void validate() const {
    using detail::require;
    require(dim >= 1, "dim must be >= 1");
    require(lambda >= 2, "population size must be >= 2");
    require(mu >= 1 && mu <= lambda, "mu must lie in [1, lambda]");
    require(weights.size() == lambda, "weights must have lambda entries");
    require(weights.allFinite(), "weights must be finite");
    double pos_sum = 0.0, sq_sum = 0.0;
    for (int i = 0; i < mu; ++i) {
      require(weights[i] > 0.0, "weights 1..mu must be positive");
      if (i > 0) require(weights[i] <= weights[i - 1], "weights must be non-increasing");
      pos_sum += weights[i];
      sq_sum += weights[i] * weights[i];
    }
    for (int i = mu; i < lambda; ++i)
      require(weights[i] <= weights[i - 1], "weights must be non-increasing");
    require(std::abs(pos_sum - 1.0) <= 1e-12, "weights 1..mu must sum to 1");
    require(std::abs(mu_w - 1.0 / sq_sum) <= 1e-12 * std::max(1.0, mu_w),
            "mu_w must equal 1 / sum of squared parent weights");
    require(c_sigma > 0.0 && c_sigma <= 1.0, "c_sigma must lie in (0, 1]");
    require(c_c > 0.0 && c_c <= 1.0, "c_c must lie in (0, 1]");
    require(c_1 >= 0.0 && c_mu >= 0.0, "learning rates must be non-negative");
    require(c_1 + c_mu * weights.cwiseMax(0.0).sum() <= 1.0 + 1e-12,
            "c_1 + c_mu * sum(positive weights) must not exceed 1");
    require(d_sigma >= 1.0, "d_sigma must be >= 1");
    require(std::isfinite(c_m) && c_m > 0.0, "c_m must be positive");
  }
};

/// Approximation of E||N(0, I)|| in `dim` dimensions.
inline double expected_norm(int dim) {
  const double d = dim;
  return std::sqrt(d) * (1.0 - 1.0 / (4.0 * d) + 1.0 / (21.0 * d * d));
}

inline int default_population_size(int dim) {
  return 4 + static_cast<int>(std::floor(3.0 * std::log(static_cast<double>(dim))));
}

/// Default constants for a problem of dimension `dim`, including the
/// negative (active) tail weights.
inline HyperParams default_hyperparams(int dim, std::optional<int> lambda = std::nullopt) {
  detail::require(dim >= 1, "dim must be >= 1");
  if (lambda) detail::require(*lambda >= 2, "population size must be >= 2");

  HyperParams hp;
  hp.dim = dim;
  hp.lambda = lambda.value_or(default_population_size(dim));
  hp.mu = hp.lambda / 2;
  const double d = dim;

  Vector raw(hp.lambda);
  for (int i = 0; i < hp.lambda; ++i)
    raw[i] = std::log((hp.lambda + 1) / 2.0) - std::log(static_cast<double>(i + 1));

  double pos_sum = 0.0, neg_sum = 0.0, neg_sq = 0.0;
  for (int i = 0; i < hp.lambda; ++i) {
    if (i < hp.mu) {
      pos_sum += raw[i];
    } else if (raw[i] < 0.0) {
      neg_sum += -raw[i];
      neg_sq += raw[i] * raw[i];
    }
  }
  hp.weights.resize(hp.lambda);
  for (int i = 0; i < hp.mu; ++i) hp.weights[i] = raw[i] / pos_sum;
  hp.mu_w = 1.0 / hp.weights.head(hp.mu).squaredNorm();

  hp.c_sigma = (hp.mu_w + 2.0) / (d + hp.mu_w + 5.0);
  hp.d_sigma = 1.0 + 2.0 * std::max(0.0, std::sqrt((hp.mu_w - 1.0) / (d + 1.0)) - 1.0) + hp.c_sigma;
  hp.c_c = (4.0 + hp.mu_w / d) / (d + 4.0 + 2.0 * hp.mu_w / d);
  hp.c_1 = 2.0 / ((d + 1.3) * (d + 1.3) + hp.mu_w);
  hp.c_mu = std::min(1.0 - hp.c_1,
                     2.0 * (hp.mu_w - 2.0 + 1.0 / hp.mu_w) / ((d + 2.0) * (d + 2.0) + hp.mu_w));
  hp.c_m = 1.0;

  // Active-CMA tail scaling: the smallest of the three caps.
  double neg_scale = 0.0;
  if (neg_sum > 0.0) {
    const double mu_eff_neg = neg_sum * neg_sum / neg_sq;
    double cap = 1.0 + 2.0 * mu_eff_neg / (hp.mu_w + 2.0);
    if (hp.c_mu > 0.0) {
      cap = std::min(cap, 1.0 + hp.c_1 / hp.c_mu);
      cap = std::min(cap, (1.0 - hp.c_1 - hp.c_mu) / (d * hp.c_mu));
    }
    neg_scale = cap / neg_sum;
  }

  for (int i = hp.mu; i < hp.lambda; ++i) hp.weights[i] = std::min(raw[i], 0.0) * neg_scale;
  return hp;
}

}  // namespace cmaes
