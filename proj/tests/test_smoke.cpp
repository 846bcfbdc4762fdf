#include <gtest/gtest.h>

#include "cmaes/bench/fuzz.hpp"
#include "cmaes/bench/quick_benchmark.hpp"
#include "cmaes/bench/trajectory.hpp"
#include "cmaes/cmaes.hpp"

TEST(Smoke, SphereConverges) {
  cmaes::CmaOptions opt;
  opt.seed = 1;
  cmaes::CMA es(cmaes::Vector::Constant(3, 2.0), 1.0, opt);
  double best = 1e300;
  for (int g = 0; g < 400 && !es.should_stop(); ++g) {
    std::vector<cmaes::EvaluatedSolution> batch;
    for (int k = 0; k < es.population_size(); ++k) {
      cmaes::Vector x = es.ask();
      batch.push_back({x, x.squaredNorm()});
      best = std::min(best, x.squaredNorm());
    }
    es.tell(batch);
  }
  EXPECT_LT(best, 1e-10);
}
