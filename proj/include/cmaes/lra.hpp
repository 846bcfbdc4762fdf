#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "cmaes/update.hpp"

namespace cmaes {

/// Learning-rate adaptation constants. `adapt = false` pins both rates at 1,
/// which leaves the plain update untouched.
struct LraConfig {
  double alpha = 1.4;        // target SNR
  double beta_mean = 0.1;    // smoothing for the mean statistics
  double beta_sigma = 0.03;  // smoothing for the (sigma, C) statistics
  double gamma = 0.1;        // damping of the rate change
  bool adapt = true;
};

/// Moving averages of the one-generation parameter change, measured in the
/// local coordinates of the pre-update distribution, and the learning rates
/// derived from them.
struct LraState {
  LraConfig config;
  double eta_mean = 1.0;
  double eta_sigma = 1.0;
  Vector ema_mean;         // E[delta m]
  Matrix ema_sigma;        // E[delta Sigma], symmetric
  double ema_sq_mean = 0.0;   // E[||delta m||^2]
  double ema_sq_sigma = 0.0;  // E[||delta Sigma||_F^2]

  static LraState initial(int dim, LraConfig cfg = {}) {
    LraState s;
    s.config = cfg;
    s.ema_mean = Vector::Zero(dim);
    s.ema_sigma = Matrix::Zero(dim, dim);
    return s;
  }
};

/// Bias-corrected SNR estimate from the smoothed first and second moments;
/// nothing when the variance estimate is not positive.
inline std::optional<double> estimate_snr(double sq_norm_of_avg, double avg_of_sq_norm, double beta) {
  const double denom = avg_of_sq_norm - sq_norm_of_avg;
  if (!(denom > 0.0)) return std::nullopt;
  return (sq_norm_of_avg - (beta / (2.0 - beta)) * avg_of_sq_norm) / denom;
}

/// Multiplicative rate update toward the target SNR, clamped to (0, 1].
inline double next_learning_rate(double eta, std::optional<double> snr, double alpha, double beta,
                                 double gamma) {
  if (!snr || !std::isfinite(*snr)) return eta;
  const double relative = std::clamp(*snr / (alpha * eta) - 1.0, -1.0, 1.0);
  const double next = eta * std::exp(std::min(gamma * eta, beta) * relative);
  return std::clamp(next, std::numeric_limits<double>::min(), 1.0);
}

/// Rescale a pending update by the adapted learning rates. `old_inv_sqrt_c`
/// is C^{-1/2} of the pre-update distribution.
inline void lra_adapt(LraState& lra, const DistributionState& old, const Matrix& old_inv_sqrt_c,
                      CmaUpdate& up) {
  const LraConfig& cfg = lra.config;
  const int d = old.dim();

  const Vector delta_mean = up.mean - old.mean;
  const Matrix old_big_sigma = old.sigma * old.sigma * old.cov;
  const Matrix delta_big_sigma = up.sigma * up.sigma * up.cov - old_big_sigma;

  const Matrix to_local = old_inv_sqrt_c / old.sigma;
  const Vector local_mean = to_local * delta_mean;
  Matrix local_sigma = to_local * delta_big_sigma * to_local / std::sqrt(2.0);
  local_sigma = (0.5 * (local_sigma + local_sigma.transpose())).eval();

  lra.ema_mean = (1.0 - cfg.beta_mean) * lra.ema_mean + cfg.beta_mean * local_mean;
  lra.ema_sigma = (1.0 - cfg.beta_sigma) * lra.ema_sigma + cfg.beta_sigma * local_sigma;
  lra.ema_sq_mean = (1.0 - cfg.beta_mean) * lra.ema_sq_mean + cfg.beta_mean * local_mean.squaredNorm();
  lra.ema_sq_sigma =
      (1.0 - cfg.beta_sigma) * lra.ema_sq_sigma + cfg.beta_sigma * local_sigma.squaredNorm();

  if (!cfg.adapt) return;

  const auto snr_mean = estimate_snr(lra.ema_mean.squaredNorm(), lra.ema_sq_mean, cfg.beta_mean);
  const auto snr_sigma = estimate_snr(lra.ema_sigma.squaredNorm(), lra.ema_sq_sigma, cfg.beta_sigma);
  const double eta_mean_before = lra.eta_mean;
  lra.eta_mean = next_learning_rate(lra.eta_mean, snr_mean, cfg.alpha, cfg.beta_mean, cfg.gamma);
  lra.eta_sigma = next_learning_rate(lra.eta_sigma, snr_sigma, cfg.alpha, cfg.beta_sigma, cfg.gamma);

  up.mean = old.mean + lra.eta_mean * delta_mean;
  Matrix big_sigma = old_big_sigma + lra.eta_sigma * delta_big_sigma;
  big_sigma = (0.5 * (big_sigma + big_sigma.transpose())).eval();

  Eigen::LLT<Matrix> chol(big_sigma);
  if (chol.info() != Eigen::Success)
    throw NumericalError("interpolated covariance is not positive definite");
  const double log_det = 2.0 * chol.matrixLLT().diagonal().array().log().sum();
  up.sigma = std::exp(log_det / (2.0 * d));
  up.cov = big_sigma / (up.sigma * up.sigma);
  // Keep the sampling scale consistent with the slower mean movement.
  up.sigma *= eta_mean_before / lra.eta_mean;

  if (!up.mean.allFinite() || !up.cov.allFinite() || !std::isfinite(up.sigma) || !(up.sigma > 0.0))
    throw NumericalError("learning-rate adapted update produced non-finite parameters");
}

}  // namespace cmaes
