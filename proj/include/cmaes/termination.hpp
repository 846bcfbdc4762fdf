#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "cmaes/distribution.hpp"
#include "cmaes/hyperparams.hpp"

namespace cmaes {

enum class TerminationReason {
  TolFun,
  TolX,
  TolXUp,
  ConditionCov,
  NoEffectAxis,
  NoEffectCoord,
  Stagnation,
  MaxGenerations,
};

constexpr std::string_view to_string(TerminationReason r) {
  switch (r) {
    case TerminationReason::TolFun: return "TolFun";
    case TerminationReason::TolX: return "TolX";
    case TerminationReason::TolXUp: return "TolXUp";
    case TerminationReason::ConditionCov: return "ConditionCov";
    case TerminationReason::NoEffectAxis: return "NoEffectAxis";
    case TerminationReason::NoEffectCoord: return "NoEffectCoord";
    case TerminationReason::Stagnation: return "Stagnation";
    case TerminationReason::MaxGenerations: return "MaxGenerations";
  }
  return "unknown";
}

struct TerminationConfig {
  double tol_fun = 1e-12;
  double tol_x_rel = 1e-12;     // relative to sigma0
  double tol_x_up_rel = 1e4;    // relative to sigma0
  double tol_condition = 1e14;
  std::optional<std::int64_t> max_generations;
  bool stagnation = true;  // off for runs whose progress is deliberately slow
};

/// Best-value ring buffer for TolFun plus the best-ever tracker for Stagnation.
struct SearchHistory {
  std::vector<double> window;  // capacity = window.size()
  std::int64_t count = 0;      // total values appended
  double best_ever = std::numeric_limits<double>::infinity();
  std::int64_t last_improvement = 0;  // generation of the last best-ever improvement

  static int tolfun_window(int dim, int lambda) {
    return 10 + static_cast<int>(std::ceil(30.0 * dim / lambda));
  }
  static std::int64_t stagnation_window(int dim, int lambda) {
    return 100 + static_cast<std::int64_t>(100.0 * std::pow(dim, 1.5) / lambda);
  }

  static SearchHistory for_problem(int dim, int lambda) {
    SearchHistory h;
    h.window.assign(static_cast<std::size_t>(tolfun_window(dim, lambda)), 0.0);
    return h;
  }

  void append(double best_value, std::int64_t generation) {
    window[static_cast<std::size_t>(count % static_cast<std::int64_t>(window.size()))] = best_value;
    ++count;
    if (best_value < best_ever) {
      best_ever = best_value;
      last_improvement = generation;
    }
  }

  bool full() const { return count >= static_cast<std::int64_t>(window.size()); }
};

/// First triggered stopping condition in the fixed order of the enum, or
/// nothing while the run is healthy.
inline std::optional<TerminationReason> check_termination(DistributionState& state,
                                                          const EvolutionPaths& paths,
                                                          const HyperParams& hp,
                                                          const SearchHistory& history,
                                                          double sigma0,
                                                          const TerminationConfig& cfg = {}) {
  const EigenCache& e = state.decomposed();
  const Vector diag = state.cov.diagonal();
  const double sigma = state.sigma;

  if (history.full() && !history.window.empty()) {
    const auto [lo, hi] = std::minmax_element(history.window.begin(), history.window.end());
    if (*hi - *lo < cfg.tol_fun) return TerminationReason::TolFun;
  }

  const double tol_x = cfg.tol_x_rel * sigma0;
  if ((sigma * diag.cwiseSqrt().array() < tol_x).all() &&
      (sigma * paths.p_c.cwiseAbs().array() < tol_x).all())
    return TerminationReason::TolX;

  if (sigma * e.D.maxCoeff() > cfg.tol_x_up_rel * sigma0) return TerminationReason::TolXUp;

  const double eig_max = e.D.maxCoeff() * e.D.maxCoeff();
  const double eig_min = e.D.minCoeff() * e.D.minCoeff();
  if (eig_max / eig_min > cfg.tol_condition) return TerminationReason::ConditionCov;

  const int axis = static_cast<int>(state.generation % hp.dim);
  const Vector shifted = state.mean + 0.1 * sigma * e.D[axis] * e.B.col(axis);
  if ((shifted.array() == state.mean.array()).all()) return TerminationReason::NoEffectAxis;

  const Vector nudged = state.mean + 0.2 * sigma * diag.cwiseSqrt();
  if ((nudged.array() == state.mean.array()).any()) return TerminationReason::NoEffectCoord;

  if (cfg.stagnation && state.generation - history.last_improvement >
      SearchHistory::stagnation_window(hp.dim, hp.lambda) && history.count > 0)
    return TerminationReason::Stagnation;

  if (cfg.max_generations && state.generation >= *cfg.max_generations)
    return TerminationReason::MaxGenerations;

  return std::nullopt;
}

}  // namespace cmaes
