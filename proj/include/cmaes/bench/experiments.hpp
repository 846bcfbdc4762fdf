#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include "cmaes/bench/runner.hpp"
#include "cmaes/warm_start.hpp"

namespace cmaes::bench {

/// Rastrigin setting of the learning-rate experiment: m0 = [3, ..., 3],
/// sigma0 = 2, lambda = 15. Runs end at the budget or at a tolerance stop;
/// the stagnation test is off because small learning rates make slow
/// progress on purpose.
inline RunConfig rastrigin_config(int dim, bool lr_adapt, std::uint64_t seed, std::int64_t budget) {
  RunConfig c;
  c.fn = "rastrigin";
  c.dim = dim;
  c.seed = seed;
  c.budget = budget;
  c.popsize = 15;
  c.sigma0 = 2.0;
  c.mean0 = Vector::Constant(dim, 3.0);
  c.lr_adapt = lr_adapt;
  c.termination.stagnation = false;
  return c;
}

struct SuccessRate {
  double rate = 0.0;
  std::vector<double> best_values;  // one per seed
};

/// Fraction of seeds whose best value drops below `threshold` (1.0 marks the
/// global basin of Rastrigin).
inline SuccessRate rastrigin_success_rate(int dim, bool lr_adapt, std::span<const std::uint64_t> seeds,
                                          std::int64_t budget, double threshold = 1.0) {
  SuccessRate out;
  if (seeds.empty()) return out;
  int hits = 0;
  for (auto seed : seeds) {
    const RunRecord rec = run(rastrigin_config(dim, lr_adapt, seed, budget));
    out.best_values.push_back(rec.best.value);
    if (rec.best.value < threshold) ++hits;
  }
  out.rate = static_cast<double>(hits) / static_cast<double>(seeds.size());
  return out;
}

/// Evaluations a CMA-ES needs to bring ||x - optimum||^2 below `target`;
/// `max_evals + 1` when it never does.
inline std::int64_t evaluations_to_sphere_target(const Vector& optimum, Vector mean, double sigma,
                                                 std::optional<Matrix> cov, std::uint64_t seed,
                                                 double target = 1e-8, std::int64_t max_evals = 100000) {
  CmaOptions o;
  o.seed = seed;
  o.cov = std::move(cov);
  CMA es(std::move(mean), sigma, o);
  std::int64_t evals = 0;
  std::vector<EvaluatedSolution> batch;
  while (evals < max_evals) {
    batch.clear();
    for (int i = 0; i < es.population_size(); ++i) {
      Vector x = es.ask();
      const double v = (x - optimum).squaredNorm();
      ++evals;
      if (v < target) return evals;
      batch.push_back({std::move(x), v});
    }
    es.tell(batch);
    if (es.should_stop()) break;
  }
  return max_evals + 1;
}

struct WarmStartComparison {
  std::vector<std::int64_t> cold;
  std::vector<std::int64_t> warm;
  int warm_wins = 0;
};

/// Archive of every point a CMA-ES evaluated while optimizing the source
/// task ||x - source_optimum||^2 for `generations` generations from the
/// origin with sigma 2.
inline std::vector<EvaluatedSolution> source_archive(const Vector& source_optimum, int generations,
                                                     std::uint64_t seed) {
  CmaOptions o;
  o.seed = seed;
  CMA es(Vector::Zero(source_optimum.size()), 2.0, o);
  std::vector<EvaluatedSolution> archive;
  std::vector<EvaluatedSolution> batch;
  for (int g = 0; g < generations; ++g) {
    batch.clear();
    for (int i = 0; i < es.population_size(); ++i) {
      Vector x = es.ask();
      batch.push_back({x, (x - source_optimum).squaredNorm()});
    }
    archive.insert(archive.end(), batch.begin(), batch.end());
    es.tell(batch);
  }
  return archive;
}

/// Cold start (origin, sigma 2, C = I) against a warm start estimated from
/// the source archive, both on the target task ||x - target_optimum||^2.
inline WarmStartComparison warm_start_speedup_check(const Vector& source_optimum, const Vector& target_optimum,
                                                    std::span<const std::uint64_t> seeds,
                                                    int source_generations = 30, WarmStartConfig cfg = {}) {
  const auto d = source_optimum.size();
  WarmStartComparison out;
  for (auto seed : seeds) {
    const auto archive = source_archive(source_optimum, source_generations, seed ^ 0x9e3779b97f4a7c15ULL);
    const WarmStartDistribution ws = get_warm_start_mgd(archive, cfg);
    const auto cold = evaluations_to_sphere_target(target_optimum, Vector::Zero(d), 2.0, std::nullopt, seed);
    const auto warm = evaluations_to_sphere_target(target_optimum, ws.mean, ws.sigma, ws.cov, seed);
    out.cold.push_back(cold);
    out.warm.push_back(warm);
    if (warm < cold) ++out.warm_wins;
  }
  return out;
}

}  // namespace cmaes::bench
