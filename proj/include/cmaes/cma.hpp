#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>

#include "cmaes/distribution.hpp"
#include "cmaes/hyperparams.hpp"
#include "cmaes/lra.hpp"
#include "cmaes/rng.hpp"
#include "cmaes/snapshot.hpp"
#include "cmaes/termination.hpp"
#include "cmaes/update.hpp"

namespace cmaes {

struct CmaOptions {
  std::optional<int> population_size;
  std::optional<Matrix> cov;                  // initial C; identity when absent
  std::optional<HyperParams> hyperparams;     // overrides every default constant
  std::uint64_t seed = 0;
  bool lr_adapt = false;
  LraConfig lra;
  TerminationConfig termination;
};

/// Ask-and-tell CMA-ES.
///
/// Not thread-safe: one instance must not be asked or told concurrently.
/// Candidates returned by ask() may be evaluated in any order or in parallel;
/// tell() takes the whole generation at once.
class CMA {
 public:
  CMA(Vector mean, double sigma, CmaOptions opts = {}) : termination_(opts.termination) {
    using detail::require;
    require(mean.size() >= 1, "mean must have at least one coordinate");
    require(mean.allFinite(), "mean must be finite");
    require(std::isfinite(sigma) && sigma > 0.0, "sigma must be positive and finite");
    const int d = static_cast<int>(mean.size());
    if (opts.hyperparams) {
      hp_ = std::move(*opts.hyperparams);
      require(hp_.dim == d, "hyperparameters were built for a different dimension");
      hp_.validate();
    } else {
      hp_ = default_hyperparams(d, opts.population_size);
    }

    state_.mean = std::move(mean);
    state_.sigma = sigma;
    if (opts.cov) {
      Matrix c = std::move(*opts.cov);
      require(c.rows() == d && c.cols() == d, "cov must be dim x dim");
      require(c.allFinite(), "cov must be finite");
      const double scale = std::max(c.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
      require((c - c.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * scale, "cov must be symmetric");
      c = (0.5 * (c + c.transpose())).eval();
      Eigen::LLT<Matrix> chol(c);
      require(chol.info() == Eigen::Success, "cov must be positive definite");
      state_.cov = std::move(c);
    } else {
      state_.cov = Matrix::Identity(d, d);
    }
    paths_ = EvolutionPaths::zeros(d);
    history_ = SearchHistory::for_problem(d, hp_.lambda);
    sigma0_ = sigma;
    rng_.reseed(opts.seed);
    if (opts.lr_adapt) lra_ = LraState::initial(d, opts.lra);
  }

  int dim() const { return hp_.dim; }
  int population_size() const { return hp_.lambda; }
  std::int64_t generation() const { return state_.generation; }

  const DistributionState& state() const { return state_; }
  const EvolutionPaths& paths() const { return paths_; }
  const HyperParams& hyperparams() const { return hp_; }
  const SearchHistory& history() const { return history_; }
  const std::optional<LraState>& lra() const { return lra_; }
  const TerminationConfig& termination() const { return termination_; }
  double sigma0() const { return sigma0_; }
  Rng& rng() { return rng_; }
  const Rng& rng() const { return rng_; }

  /// Current C with a fresh eigendecomposition.
  const EigenCache& eigen() { return state_.decomposed(); }

  /// Sample one candidate from N(m, sigma^2 C).
  Vector ask() { return sample(state_, rng_).x; }

  /// Update the distribution from one full generation. On error the
  /// optimizer is left exactly as before the call.
  void tell(std::span<const EvaluatedSolution> solutions) {
    CmaUpdate up = compute_update(state_, paths_, hp_, solutions);
    if (lra_) {
      LraState next = *lra_;
      lra_adapt(next, state_, state_.eigen.inv_sqrt(), up);
      *lra_ = std::move(next);
    }
    commit(std::move(up));
  }

  std::optional<TerminationReason> should_stop() {
    return check_termination(state_, paths_, hp_, history_, sigma0_, termination_);
  }

  /// Direct access for wrappers that post-process the distribution
  /// (margin correction). Callers must keep C symmetric positive definite
  /// and call mark_stale() after editing it.
  DistributionState& mutable_state() { return state_; }

  Snapshot snapshot() const {
    Snapshot s;
    s.dim = hp_.dim;
    s.lambda = hp_.lambda;
    s.mu = hp_.mu;
    s.weights = hp_.weights;
    s.mu_w = hp_.mu_w;
    s.c_sigma = hp_.c_sigma;
    s.d_sigma = hp_.d_sigma;
    s.c_c = hp_.c_c;
    s.c_1 = hp_.c_1;
    s.c_mu = hp_.c_mu;
    s.c_m = hp_.c_m;
    s.tol_fun = termination_.tol_fun;
    s.tol_x_rel = termination_.tol_x_rel;
    s.tol_x_up_rel = termination_.tol_x_up_rel;
    s.tol_condition = termination_.tol_condition;
    s.max_generations = termination_.max_generations;
    s.stagnation = termination_.stagnation;
    s.sigma0 = sigma0_;
    s.mean = state_.mean;
    s.sigma = state_.sigma;
    s.cov = state_.cov;
    s.generation = state_.generation;
    s.p_sigma = paths_.p_sigma;
    s.p_c = paths_.p_c;
    s.rng_state = rng_.state();
    s.history_window = history_.window;
    s.history_count = history_.count;
    s.best_ever = history_.best_ever;
    s.last_improvement = history_.last_improvement;
    if (lra_) {
      Snapshot::Lra l;
      l.alpha = lra_->config.alpha;
      l.beta_mean = lra_->config.beta_mean;
      l.beta_sigma = lra_->config.beta_sigma;
      l.gamma = lra_->config.gamma;
      l.adapt = lra_->config.adapt;
      l.eta_mean = lra_->eta_mean;
      l.eta_sigma = lra_->eta_sigma;
      l.ema_mean = lra_->ema_mean;
      l.ema_sigma = lra_->ema_sigma;
      l.ema_sq_mean = lra_->ema_sq_mean;
      l.ema_sq_sigma = lra_->ema_sq_sigma;
      s.lra = std::move(l);
    }
    return s;
  }

  /// Rebuild an optimizer from a snapshot. Throws ValidationError when the
  /// record is internally inconsistent.
  static CMA restore(const Snapshot& s) {
    using detail::require;
    HyperParams hp;
    hp.dim = s.dim;
    hp.lambda = s.lambda;
    hp.mu = s.mu;
    hp.weights = s.weights;
    hp.mu_w = s.mu_w;
    hp.c_sigma = s.c_sigma;
    hp.d_sigma = s.d_sigma;
    hp.c_c = s.c_c;
    hp.c_1 = s.c_1;
    hp.c_mu = s.c_mu;
    hp.c_m = s.c_m;
    require(s.mean.size() == s.dim && s.p_sigma.size() == s.dim && s.p_c.size() == s.dim,
            "snapshot vectors disagree with its dimension");
    require(std::isfinite(s.sigma0) && s.sigma0 > 0.0, "snapshot sigma0 must be positive");
    CmaOptions opts;
    opts.hyperparams = std::move(hp);
    opts.cov = s.cov;
    opts.termination = {s.tol_fun, s.tol_x_rel, s.tol_x_up_rel, s.tol_condition, s.max_generations,
                        s.stagnation};
    if (s.lra) {
      opts.lr_adapt = true;
      opts.lra = {s.lra->alpha, s.lra->beta_mean, s.lra->beta_sigma, s.lra->gamma, s.lra->adapt};
    }
    CMA cma(s.mean, s.sigma, std::move(opts));
    // The constructor symmetrizes; snapshots store exactly symmetric C so this is lossless.
    cma.state_.cov = s.cov;
    cma.state_.generation = s.generation;
    cma.paths_ = {s.p_sigma, s.p_c};
    require(paths_finite(cma.paths_), "snapshot evolution paths must be finite");
    cma.sigma0_ = s.sigma0;
    cma.rng_.set_state(s.rng_state);
    require(s.history_window.size() == cma.history_.window.size(),
            "snapshot history window has the wrong length");
    cma.history_.window = s.history_window;
    cma.history_.count = s.history_count;
    cma.history_.best_ever = s.best_ever;
    cma.history_.last_improvement = s.last_improvement;
    if (s.lra) {
      require(s.lra->ema_mean.size() == s.dim && s.lra->ema_sigma.rows() == s.dim &&
                  s.lra->ema_sigma.cols() == s.dim,
              "snapshot learning-rate state has the wrong shape");
      require(s.lra->eta_mean > 0.0 && s.lra->eta_mean <= 1.0 && s.lra->eta_sigma > 0.0 &&
                  s.lra->eta_sigma <= 1.0,
              "snapshot learning rates must lie in (0, 1]");
      auto& l = *cma.lra_;
      l.eta_mean = s.lra->eta_mean;
      l.eta_sigma = s.lra->eta_sigma;
      l.ema_mean = s.lra->ema_mean;
      l.ema_sigma = s.lra->ema_sigma;
      l.ema_sq_mean = s.lra->ema_sq_mean;
      l.ema_sq_sigma = s.lra->ema_sq_sigma;
    }
    return cma;
  }

 private:
  static bool paths_finite(const EvolutionPaths& p) {
    return p.p_sigma.allFinite() && p.p_c.allFinite();
  }

  void commit(CmaUpdate&& up) {
    state_.mean = std::move(up.mean);
    state_.sigma = up.sigma;
    state_.cov = std::move(up.cov);
    state_.mark_stale();
    paths_ = std::move(up.paths);
    ++state_.generation;
    history_.append(up.best_value, state_.generation);
  }

  HyperParams hp_;
  DistributionState state_;
  EvolutionPaths paths_;
  SearchHistory history_;
  TerminationConfig termination_;
  double sigma0_ = 1.0;
  Rng rng_;
  std::optional<LraState> lra_;
};

}  // namespace cmaes
