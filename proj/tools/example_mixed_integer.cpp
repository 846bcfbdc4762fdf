// Margin-corrected CMA-ES on a problem with two continuous and two integer
// coordinates (integers in [-10, 10]).

#include <iostream>
#include <vector>

#include "cmaes/cmawm.hpp"

int main() {
  const int d = 4;
  cmaes::BoxBounds bounds = cmaes::BoxBounds::unbounded(d);
  cmaes::Vector steps = cmaes::Vector::Zero(d);
  for (int i = 2; i < d; ++i) {
    bounds.lower[i] = -10;
    bounds.upper[i] = 10;
    steps[i] = 1;
  }
  auto f = [](const cmaes::Vector& x) {
    return x[0] * x[0] + x[1] * x[1] + (x[2] - 3) * (x[2] - 3) + (x[3] + 4) * (x[3] + 4);
  };

  cmaes::CmaOptions opts;
  opts.seed = 1;
  cmaes::CMAwM optimizer(cmaes::Vector::Zero(d), 2.0, bounds, steps, opts);
  cmaes::Vector best;
  double best_value = 1e300;
  for (int generation = 0; generation < 300 && !optimizer.should_stop(); ++generation) {
    std::vector<cmaes::EvaluatedSolution> solutions;
    for (int i = 0; i < optimizer.population_size(); ++i) {
      auto [x_eval, x_tell] = optimizer.ask();
      const double v = f(x_eval);
      if (v < best_value) {
        best_value = v;
        best = x_eval;
      }
      solutions.push_back({x_tell, v});
    }
    optimizer.tell(solutions);
  }
  std::cout << "best " << best.transpose() << "  f = " << best_value << '\n';
}
