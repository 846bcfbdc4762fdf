#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "cmaes/types.hpp"

namespace cmaes {

/// Plain record of everything needed to resume an optimizer. Caches (the
/// eigendecomposition) are deliberately absent; symmetric matrices are held
/// in full here and packed by the encoder.
struct Snapshot {
  // Strategy constants.
  int dim = 0;
  int lambda = 0;
  int mu = 0;
  Vector weights;
  double mu_w = 0.0, c_sigma = 0.0, d_sigma = 0.0, c_c = 0.0, c_1 = 0.0, c_mu = 0.0, c_m = 1.0;

  // Termination settings.
  double tol_fun = 0.0, tol_x_rel = 0.0, tol_x_up_rel = 0.0, tol_condition = 0.0;
  std::optional<std::int64_t> max_generations;
  bool stagnation = true;

  double sigma0 = 0.0;
  Vector mean;
  double sigma = 0.0;
  Matrix cov;
  std::int64_t generation = 0;
  Vector p_sigma;
  Vector p_c;
  std::array<std::uint64_t, 4> rng_state{};

  std::vector<double> history_window;
  std::int64_t history_count = 0;
  double best_ever = 0.0;
  std::int64_t last_improvement = 0;

  struct Lra {
    double alpha = 0.0, beta_mean = 0.0, beta_sigma = 0.0, gamma = 0.0;
    bool adapt = true;
    double eta_mean = 1.0, eta_sigma = 1.0;
    Vector ema_mean;
    Matrix ema_sigma;
    double ema_sq_mean = 0.0, ema_sq_sigma = 0.0;
  };
  std::optional<Lra> lra;

  struct Margin {
    Vector lower, upper, steps;
    double alpha = 0.0;
    int max_resamples = 100;
  };
  std::optional<Margin> margin;
};

}  // namespace cmaes
