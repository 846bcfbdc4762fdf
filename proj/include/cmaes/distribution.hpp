#pragma once

#include <algorithm>
#include <cstdint>

#include "cmaes/errors.hpp"
#include "cmaes/rng.hpp"
#include "cmaes/types.hpp"

namespace cmaes {

/// C = B * diag(D)^2 * B^T, cached between updates of C.
struct EigenCache {
  Matrix B;
  Vector D;
  bool fresh = false;

  /// Smallest eigenvalue kept, relative to the largest.
  static constexpr double kRelativeFloor = 1e-24;

  /// Decompose `cov`. Eigenvalues below the floor are lifted to it and `cov`
  /// is rebuilt from the repaired factors so that the cache stays exact.
  void refresh(Matrix& cov) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(cov);
    if (solver.info() != Eigen::Success || !solver.eigenvalues().allFinite())
      throw NumericalError("eigendecomposition of the covariance matrix failed");
    Vector eig = solver.eigenvalues();
    const double top = eig.maxCoeff();
    if (!(top > 0.0)) throw NumericalError("covariance matrix has no positive eigenvalue");
    const double floor = top * kRelativeFloor;
    B = solver.eigenvectors();
    if (eig.minCoeff() < floor) {
      eig = eig.cwiseMax(floor);
      cov = B * eig.asDiagonal() * B.transpose();
      cov = (0.5 * (cov + cov.transpose())).eval();
    }
    D = eig.cwiseSqrt();
    fresh = true;
  }

  Matrix inv_sqrt() const { return B * D.cwiseInverse().asDiagonal() * B.transpose(); }
};

/// Sampling distribution N(mean, sigma^2 cov) with its generation counter.
struct DistributionState {
  Vector mean;
  double sigma = 1.0;
  Matrix cov;
  EigenCache eigen;
  std::int64_t generation = 0;

  int dim() const { return static_cast<int>(mean.size()); }

  const EigenCache& decomposed() {
    if (!eigen.fresh) eigen.refresh(cov);
    return eigen;
  }

  void mark_stale() { eigen.fresh = false; }
};

struct EvolutionPaths {
  Vector p_sigma;
  Vector p_c;

  static EvolutionPaths zeros(int dim) { return {Vector::Zero(dim), Vector::Zero(dim)}; }
};

/// A draw `x = mean + sigma * y` with `y = B D z`.
struct Sample {
  Vector x;
  Vector y;
};

/// Map a standard normal vector through the current distribution with the
/// symmetric square root, y = C^{1/2} z.
inline Sample transform_sample(DistributionState& state, const Vector& z) {
  const EigenCache& e = state.decomposed();
  Sample s;
  s.y = e.B * (e.D.asDiagonal() * (e.B.transpose() * z));
  s.x = state.mean + state.sigma * s.y;
  if (!s.x.allFinite()) throw NumericalError("sampled point is not finite (covariance blow-up)");
  return s;
}

/// Draw exactly `dim` normals from `rng` and transform them.
inline Sample sample(DistributionState& state, Rng& rng) {
  Vector z(state.dim());
  for (int i = 0; i < z.size(); ++i) z[i] = rng.normal();
  return transform_sample(state, z);
}

}  // namespace cmaes
