// Initialize a target-task run from the samples of a related source task.

#include <iostream>
#include <vector>

#include "cmaes/cma.hpp"
#include "cmaes/warm_start.hpp"

namespace {

cmaes::Vector target(int d, double v) { return cmaes::Vector::Constant(d, v); }

int evaluations_to(const cmaes::Vector& opt, cmaes::CMA es) {
  int evals = 0;
  while (evals < 100000) {
    std::vector<cmaes::EvaluatedSolution> batch;
    for (int i = 0; i < es.population_size(); ++i) {
      cmaes::Vector x = es.ask();
      const double v = (x - opt).squaredNorm();
      ++evals;
      if (v < 1e-8) return evals;
      batch.push_back({x, v});
    }
    es.tell(batch);
  }
  return evals;
}

}  // namespace

int main() {
  const int d = 4;
  const cmaes::Vector source_opt = target(d, 1.4), target_opt = target(d, 1.5);

  // Source task: collect everything a short run evaluated.
  std::vector<cmaes::EvaluatedSolution> archive;
  cmaes::CMA source(cmaes::Vector::Zero(d), 2.0);
  for (int g = 0; g < 30; ++g) {
    std::vector<cmaes::EvaluatedSolution> batch;
    for (int i = 0; i < source.population_size(); ++i) {
      cmaes::Vector x = source.ask();
      batch.push_back({x, (x - source_opt).squaredNorm()});
    }
    archive.insert(archive.end(), batch.begin(), batch.end());
    source.tell(batch);
  }

  const cmaes::WarmStartDistribution ws = cmaes::get_warm_start_mgd(archive);
  cmaes::CmaOptions warm_opts;
  warm_opts.cov = ws.cov;
  std::cout << "cold start: " << evaluations_to(target_opt, cmaes::CMA(cmaes::Vector::Zero(d), 2.0))
            << " evaluations\n";
  std::cout << "warm start: " << evaluations_to(target_opt, cmaes::CMA(ws.mean, ws.sigma, warm_opts))
            << " evaluations\n";
}
