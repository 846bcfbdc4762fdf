#pragma once

#include <Eigen/Dense>

namespace cmaes {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A candidate point paired with its objective value.
struct EvaluatedSolution {
  Vector x;
  double value = 0.0;
};

inline bool all_finite(const Vector& v) { return v.allFinite(); }
inline bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace cmaes
