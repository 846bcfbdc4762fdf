#pragma once

#include <limits>

#include "cmaes/cma.hpp"

namespace cmaes {

/// Per-coordinate closed intervals; entries may be infinite.
struct BoxBounds {
  Vector lower;
  Vector upper;

  static BoxBounds unbounded(int dim) {
    const double inf = std::numeric_limits<double>::infinity();
    return {Vector::Constant(dim, -inf), Vector::Constant(dim, inf)};
  }

  static BoxBounds uniform(int dim, double lo, double hi) {
    return {Vector::Constant(dim, lo), Vector::Constant(dim, hi)};
  }

  int dim() const { return static_cast<int>(lower.size()); }

  void validate(int expected_dim) const {
    detail::require(lower.size() == expected_dim && upper.size() == expected_dim,
                    "bounds must have one interval per dimension");
    for (int i = 0; i < expected_dim; ++i) {
      detail::require(!std::isnan(lower[i]) && !std::isnan(upper[i]), "bounds must not be NaN");
      detail::require(lower[i] < upper[i], "every bound interval needs lower < upper");
    }
  }

  bool contains(const Vector& x) const {
    return (x.array() >= lower.array()).all() && (x.array() <= upper.array()).all();
  }

  Vector clip(const Vector& x) const { return x.cwiseMax(lower).cwiseMin(upper); }
};

/// Diagnostics counters for ask_feasible.
struct ResampleStats {
  std::int64_t resamples = 0;  // rejected draws
  std::int64_t overflows = 0;  // asks that fell back to clipping
};

/// Resample until the draw lies in `bounds`; after `max_resamples` draws the
/// last one is clipped into the box.
inline Vector ask_feasible(CMA& opt, const BoxBounds& bounds, int max_resamples = 100,
                           ResampleStats* stats = nullptr) {
  detail::require(max_resamples >= 1, "max_resamples must be positive");
  Vector x;
  for (int i = 0; i < max_resamples; ++i) {
    x = opt.ask();
    if (bounds.contains(x)) return x;
    if (stats) ++stats->resamples;
  }
  if (stats) ++stats->overflows;
  return bounds.clip(x);
}

}  // namespace cmaes
