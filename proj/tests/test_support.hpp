#pragma once

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "cmaes/cma.hpp"
#include "reference_stepper.hpp"

namespace cmaes::testing {

/// Largest entry-wise difference, relative to max(1, |expected|).
inline double max_rel_diff(const Matrix& a, const Matrix& b) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      worst = std::max(worst, std::abs(a(i, j) - b(i, j)) / std::max(1.0, std::abs(b(i, j))));
  return worst;
}

inline double max_reference_gap(const CMA& es, const reference::State& ref) {
  double gap = 0.0;
  gap = std::max(gap, max_rel_diff(es.state().mean, ref.m));
  gap = std::max(gap, std::abs(es.state().sigma - ref.sigma) / std::max(1.0, std::abs(ref.sigma)));
  gap = std::max(gap, max_rel_diff(es.state().cov, ref.C));
  gap = std::max(gap, max_rel_diff(es.paths().p_sigma, ref.ps));
  gap = std::max(gap, max_rel_diff(es.paths().p_c, ref.pc));
  return gap;
}

inline void expect_matches_reference(const CMA& es, const reference::State& ref, double tol) {
  EXPECT_EQ(es.generation(), ref.g);
  EXPECT_LE(max_reference_gap(es, ref), tol);
}

}  // namespace cmaes::testing
