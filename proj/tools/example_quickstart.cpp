// Minimal ask-and-tell loop on f(x) = (x1 - 3)^2 + (10 (x2 + 2))^2.

#include <iostream>
#include <vector>

#include "cmaes/cma.hpp"

int main() {
  auto f = [](const cmaes::Vector& x) {
    const double a = x[0] - 3.0, b = 10.0 * (x[1] + 2.0);
    return a * a + b * b;
  };
  cmaes::CMA optimizer(cmaes::Vector::Zero(2), 2.0);
  for (int generation = 0; generation < 100; ++generation) {
    std::vector<cmaes::EvaluatedSolution> solutions;
    for (int i = 0; i < optimizer.population_size(); ++i) {
      cmaes::Vector x = optimizer.ask();
      solutions.push_back({x, f(x)});
    }
    optimizer.tell(solutions);
  }
  std::cout << "mean after 100 generations: " << optimizer.state().mean.transpose() << '\n';
}
