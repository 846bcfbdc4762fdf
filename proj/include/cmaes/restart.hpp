#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "cmaes/bounds.hpp"
#include "cmaes/cma.hpp"

namespace cmaes {

/// IPOP restart settings: each restart multiplies the population size and
/// draws a fresh mean uniformly from [init_lower, init_upper]^d.
struct RestartPolicy {
  int initial_popsize = 0;  // 0 selects the default for the dimension
  double popsize_multiplier = 2.0;
  double init_lower = -5.0;
  double init_upper = 5.0;
  int max_restarts = 9;
  double sigma = 3.0;  // used for the first run and every restart
  std::optional<Vector> initial_mean;  // first run only; uniform draw when absent
  std::optional<BoxBounds> bounds;
  int max_resamples = 100;

  void validate(int dim) const {
    using detail::require;
    require(dim >= 1, "dim must be >= 1");
    require(initial_popsize == 0 || initial_popsize >= 2, "initial population size must be >= 2");
    require(popsize_multiplier >= 1.0 && std::isfinite(popsize_multiplier),
            "population multiplier must be >= 1");
    require(init_lower < init_upper, "mean interval needs lower < upper");
    require(std::isfinite(init_lower) && std::isfinite(init_upper), "mean interval must be finite");
    require(max_restarts >= 0, "max_restarts must be non-negative");
    require(std::isfinite(sigma) && sigma > 0.0, "restart sigma must be positive");
    if (initial_mean) require(initial_mean->size() == dim, "initial mean has the wrong dimension");
    if (bounds) bounds->validate(dim);
  }
};

struct RestartResult {
  EvaluatedSolution best{Vector(), std::numeric_limits<double>::infinity()};
  bool truncated = false;  // budget ran out before the final run stopped
  int restarts = 0;
  std::vector<int> popsizes;
  std::int64_t evaluations = 0;
  std::vector<double> best_so_far;  // after every evaluation
};

/// Run IPOP-CMA-ES on `objective` until `max_restarts` runs have stopped or
/// `budget` evaluations are spent.
template <class Objective>
RestartResult restart_loop(Objective&& objective, int dim, const RestartPolicy& policy,
                           std::int64_t budget, Rng& rng) {
  policy.validate(dim);
  int popsize = policy.initial_popsize > 0 ? policy.initial_popsize : default_population_size(dim);
  detail::require(budget >= popsize, "budget must cover at least one generation");

  auto draw_mean = [&] {
    Vector m(dim);
    for (int i = 0; i < dim; ++i) m[i] = rng.uniform(policy.init_lower, policy.init_upper);
    return m;
  };
  auto make = [&](Vector mean) {
    CmaOptions opts;
    opts.population_size = popsize;
    opts.seed = rng();
    return CMA(std::move(mean), policy.sigma, opts);
  };

  RestartResult result;
  CMA opt = make(policy.initial_mean ? *policy.initial_mean : draw_mean());
  result.popsizes.push_back(popsize);
  std::vector<EvaluatedSolution> batch;

  while (true) {
    batch.clear();
    for (int k = 0; k < opt.population_size(); ++k) {
      if (result.evaluations >= budget) {
        result.truncated = true;
        return result;
      }
      Vector x = policy.bounds ? ask_feasible(opt, *policy.bounds, policy.max_resamples) : opt.ask();
      const double v = objective(x);
      ++result.evaluations;
      if (v < result.best.value) result.best = {x, v};
      result.best_so_far.push_back(result.best.value);
      batch.push_back({std::move(x), v});
    }

    bool stop = false;
    try {
      opt.tell(batch);
      stop = opt.should_stop().has_value();
    } catch (const NumericalError&) {
      stop = true;
    } catch (const ValidationError&) {
      // Non-finite objective values end this run.
      stop = true;
    }
    if (!stop) continue;
    if (result.restarts >= policy.max_restarts) return result;
    ++result.restarts;
    popsize = static_cast<int>(std::lround(popsize * policy.popsize_multiplier));
    result.popsizes.push_back(popsize);
    opt = make(draw_mean());
  }
}

}  // namespace cmaes
