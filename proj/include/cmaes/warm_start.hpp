#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "cmaes/errors.hpp"
#include "cmaes/types.hpp"

namespace cmaes {

struct WarmStartConfig {
  double gamma = 0.1;  // fraction of the archive kept, best first
  double alpha = 0.1;  // kernel width relative to the selection's bounding-box diagonal
};

struct WarmStartDistribution {
  Vector mean;
  double sigma = 0.0;
  Matrix cov;  // det(cov) = 1
};

/// Initial distribution for a target task from solutions of a related
/// source task.
///
/// The best ceil(gamma * N) points each carry an isotropic Gaussian kernel of
/// width alpha * l (l = diagonal of their bounding box). The returned Gaussian
/// is the moment match of that equal-weight mixture, which is the
/// KL(mixture || Gaussian) minimizer; its covariance is split as
/// sigma^2 * cov with det(cov) = 1.
inline WarmStartDistribution get_warm_start_mgd(std::span<const EvaluatedSolution> archive,
                                                WarmStartConfig cfg = {}) {
  using detail::require;
  require(!archive.empty(), "source archive is empty");
  require(cfg.gamma > 0.0 && cfg.gamma <= 1.0, "gamma must lie in (0, 1]");
  require(std::isfinite(cfg.alpha) && cfg.alpha > 0.0, "alpha must be positive");
  const auto d = archive.front().x.size();
  require(d >= 1, "source solutions need at least one coordinate");
  for (const auto& s : archive) {
    require(s.x.size() == d, "source solutions must share one dimension");
    require(s.x.allFinite(), "source solutions must be finite");
    require(!std::isnan(s.value), "source values must not be NaN");
  }

  const auto n = static_cast<std::size_t>(std::ceil(cfg.gamma * archive.size() - 1e-12));
  require(n >= 2, "warm start needs at least two selected source solutions");

  std::vector<std::size_t> order(archive.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return archive[a].value < archive[b].value; });

  Matrix pts(d, static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) pts.col(static_cast<Eigen::Index>(i)) = archive[order[i]].x;

  WarmStartDistribution out;
  out.mean = pts.rowwise().mean();
  const Matrix centered = pts.colwise() - out.mean;
  const Matrix empirical = centered * centered.transpose() / static_cast<double>(n);

  constexpr double kDiagonalFloor = 1e-8;
  double diag = (pts.rowwise().maxCoeff() - pts.rowwise().minCoeff()).norm();
  if (!(diag > 0.0)) diag = kDiagonalFloor;
  const double kernel = cfg.alpha * diag;

  Matrix big_sigma = empirical + kernel * kernel * Matrix::Identity(d, d);
  big_sigma = (0.5 * (big_sigma + big_sigma.transpose())).eval();

  Eigen::LLT<Matrix> chol(big_sigma);
  if (chol.info() != Eigen::Success) throw ValidationError("estimated covariance is singular");
  const double log_det = 2.0 * chol.matrixLLT().diagonal().array().log().sum();
  out.sigma = std::exp(log_det / (2.0 * static_cast<double>(d)));
  out.cov = big_sigma / (out.sigma * out.sigma);
  return out;
}

}  // namespace cmaes
