#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <boost/math/special_functions/erf.hpp>

#include "cmaes/bounds.hpp"
#include "cmaes/cma.hpp"

namespace cmaes {

/// Which coordinates are discrete and the values each can take.
///
/// A coordinate with step 0 is continuous. Otherwise its ladder is the
/// arithmetic progression lower, lower + step, ... clipped to the upper bound;
/// thresholds are the midpoints between neighbouring ladder values.
class DiscretizationSpec {
 public:
  static constexpr std::size_t kMaxLadder = 1 << 20;

  DiscretizationSpec() = default;

  DiscretizationSpec(BoxBounds bounds, Vector steps) : bounds_(std::move(bounds)), steps_(std::move(steps)) {
    using detail::require;
    const int d = static_cast<int>(steps_.size());
    require(d >= 1, "steps must have at least one entry");
    bounds_.validate(d);
    ladders_.resize(static_cast<std::size_t>(d));
    thresholds_.resize(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
      const double step = steps_[i];
      require(std::isfinite(step) && step >= 0.0, "steps must be finite and non-negative");
      if (step == 0.0) continue;
      const double lo = bounds_.lower[i], hi = bounds_.upper[i];
      require(std::isfinite(lo) && std::isfinite(hi), "discrete coordinates need finite bounds");
      const double count = std::floor((hi - lo) / step + 1e-9) + 1.0;
      require(count >= 2.0, "a discrete coordinate needs at least two representable values");
      require(count <= static_cast<double>(kMaxLadder), "discrete ladder is too long");
      auto& ladder = ladders_[static_cast<std::size_t>(i)];
      for (std::size_t k = 0; k < static_cast<std::size_t>(count); ++k)
        ladder.push_back(std::min(lo + static_cast<double>(k) * step, hi));
      auto& th = thresholds_[static_cast<std::size_t>(i)];
      for (std::size_t k = 0; k + 1 < ladder.size(); ++k) {
        th.push_back(0.5 * (ladder[k] + ladder[k + 1]));
        require(k == 0 || th[k] > th[k - 1], "thresholds must be strictly increasing");
      }
    }
  }

  /// All-continuous spec over unbounded coordinates.
  static DiscretizationSpec continuous(int dim) {
    return DiscretizationSpec(BoxBounds::unbounded(dim), Vector::Zero(dim));
  }

  int dim() const { return static_cast<int>(steps_.size()); }
  bool is_discrete(int i) const { return steps_[i] > 0.0; }
  int discrete_count() const { return static_cast<int>((steps_.array() > 0.0).count()); }
  const BoxBounds& bounds() const { return bounds_; }
  const Vector& steps() const { return steps_; }
  const std::vector<double>& ladder(int i) const { return ladders_[static_cast<std::size_t>(i)]; }
  const std::vector<double>& thresholds(int i) const {
    return thresholds_[static_cast<std::size_t>(i)];
  }

  /// Index of the ladder value a raw coordinate maps to (ties go down).
  std::size_t cell(int i, double x) const {
    const auto& th = thresholds(i);
    return static_cast<std::size_t>(std::lower_bound(th.begin(), th.end(), x) - th.begin());
  }

  /// Bounds restricted to the continuous coordinates.
  BoxBounds continuous_bounds() const {
    BoxBounds b = bounds_;
    const double inf = std::numeric_limits<double>::infinity();
    for (int i = 0; i < dim(); ++i)
      if (is_discrete(i)) {
        b.lower[i] = -inf;
        b.upper[i] = inf;
      }
    return b;
  }

 private:
  BoxBounds bounds_;
  Vector steps_;
  std::vector<std::vector<double>> ladders_;
  std::vector<std::vector<double>> thresholds_;
};

/// Continuous coordinates pass through; discrete ones snap to the nearest
/// ladder value.
inline Vector encode(const Vector& x, const DiscretizationSpec& spec) {
  detail::require(x.size() == spec.dim(), "point dimension does not match the discretization");
  Vector out = x;
  for (int i = 0; i < spec.dim(); ++i)
    if (spec.is_discrete(i)) out[i] = spec.ladder(i)[spec.cell(i, x[i])];
  return out;
}

/// Probability under N(mean, sd^2) of landing past the threshold nearest to
/// `mean`, i.e. of encoding to a different ladder value.
inline double crossing_probability(const DiscretizationSpec& spec, int i, double mean, double sd) {
  const auto& th = spec.thresholds(i);
  const std::size_t k = spec.cell(i, mean);
  double dist = std::numeric_limits<double>::infinity();
  if (k > 0) dist = std::min(dist, mean - th[k - 1]);
  if (k < th.size()) dist = std::min(dist, th[k] - mean);
  if (dist == 0.0) return 0.5;
  if (!(sd > 0.0)) return 0.0;
  return 0.5 * std::erfc(dist / (sd * std::sqrt(2.0)));
}

struct MarginConfig {
  double alpha = 0.0;

  static MarginConfig for_problem(int lambda, int dim) { return {1.0 / (lambda * dim)}; }

  void validate() const {
    detail::require(alpha > 0.0 && alpha < 0.5, "margin must lie in (0, 0.5)");
  }
};

/// Enforce the margin on each discrete coordinate independently.
///
/// The mean is moved toward the nearest threshold until the tail mass past
/// it equals alpha. When that offset is too small to represent next to the
/// threshold, the mean is pinned a few ulps away and C_jj is scaled up so the
/// tail mass is alpha again. Off-diagonal entries are not touched.
/// Returns the number of coordinates corrected.
inline int apply_margin(DistributionState& state, const DiscretizationSpec& spec,
                        const MarginConfig& margin) {
  const double z = std::sqrt(2.0) * boost::math::erfc_inv(2.0 * margin.alpha);
  int corrected = 0;
  for (int j = 0; j < spec.dim(); ++j) {
    if (!spec.is_discrete(j)) continue;
    const double m = state.mean[j];
    const double sd = state.sigma * std::sqrt(state.cov(j, j));
    if (crossing_probability(spec, j, m, sd) >= margin.alpha) continue;

    const auto& th = spec.thresholds(j);
    const std::size_t k = spec.cell(j, m);
    double t;
    double side;
    if (k > 0 && (k == th.size() || m - th[k - 1] <= th[k] - m)) {
      t = th[k - 1];
      side = 1.0;
    } else {
      t = th[k];
      side = -1.0;
    }

    const double want = sd * z;
    const double pin = 4.0 * (std::nextafter(std::abs(t), std::numeric_limits<double>::infinity()) -
                              std::abs(t));
    if (want >= pin) {
      state.mean[j] = t + side * want;
    } else {
      state.mean[j] = t + side * pin;
      const double dist = std::abs(state.mean[j] - t);
      const double target_sd = dist / z;
      state.cov(j, j) = sd > 0.0 ? state.cov(j, j) * (target_sd / sd) * (target_sd / sd)
                                 : (target_sd / state.sigma) * (target_sd / state.sigma);
    }
    // Rounding next to the threshold may leave the tail a hair short of alpha.
    const double new_sd = state.sigma * std::sqrt(state.cov(j, j));
    while (state.mean[j] != t && crossing_probability(spec, j, state.mean[j], new_sd) < margin.alpha)
      state.mean[j] = std::nextafter(state.mean[j], t);
    ++corrected;
  }
  if (corrected) state.mark_stale();
  if (!state.mean.allFinite() || !state.cov.allFinite())
    throw NumericalError("margin correction produced non-finite parameters");
  return corrected;
}

/// CMA-ES with margin for mixed continuous / integer / binary problems.
class CMAwM {
 public:
  CMAwM(Vector mean, double sigma, BoxBounds bounds, Vector steps, CmaOptions opts = {},
        std::optional<double> margin = std::nullopt, int max_resamples = 100)
      : cma_(std::move(mean), sigma, std::move(opts)),
        spec_(std::move(bounds), std::move(steps)),
        max_resamples_(max_resamples) {
    detail::require(spec_.dim() == cma_.dim(), "bounds/steps dimension does not match the mean");
    detail::require(max_resamples >= 1, "max_resamples must be positive");
    margin_ = margin ? MarginConfig{*margin} : MarginConfig::for_problem(cma_.population_size(), cma_.dim());
    margin_.validate();
    feasible_ = spec_.continuous_bounds();
  }

  int dim() const { return cma_.dim(); }
  int population_size() const { return cma_.population_size(); }
  std::int64_t generation() const { return cma_.generation(); }
  const CMA& cma() const { return cma_; }
  CMA& cma() { return cma_; }
  const DiscretizationSpec& spec() const { return spec_; }
  const MarginConfig& margin() const { return margin_; }

  /// Returns (x_eval, x_tell): the encoded point to evaluate and the raw
  /// point to hand back to tell().
  std::pair<Vector, Vector> ask() {
    Vector raw = ask_feasible(cma_, feasible_, max_resamples_);
    Vector enc = encode(raw, spec_);
    return {std::move(enc), std::move(raw)};
  }

  /// `solutions` carry the raw x_tell vectors.
  void tell(std::span<const EvaluatedSolution> solutions) {
    cma_.tell(solutions);
    if (spec_.discrete_count() > 0) apply_margin(cma_.mutable_state(), spec_, margin_);
  }

  std::optional<TerminationReason> should_stop() { return cma_.should_stop(); }

  Snapshot snapshot() const {
    Snapshot s = cma_.snapshot();
    s.margin = Snapshot::Margin{spec_.bounds().lower, spec_.bounds().upper, spec_.steps(),
                                margin_.alpha, max_resamples_};
    return s;
  }

  static CMAwM restore(const Snapshot& s) {
    detail::require(s.margin.has_value(), "snapshot carries no discretization");
    return CMAwM(CMA::restore(s), *s.margin);
  }

 private:
  CMAwM(CMA cma, const Snapshot::Margin& m)
      : cma_(std::move(cma)), spec_(BoxBounds{m.lower, m.upper}, m.steps), max_resamples_(m.max_resamples) {
    detail::require(spec_.dim() == cma_.dim(), "snapshot discretization has the wrong dimension");
    detail::require(max_resamples_ >= 1, "max_resamples must be positive");
    margin_ = MarginConfig{m.alpha};
    margin_.validate();
    feasible_ = spec_.continuous_bounds();
  }

  CMA cma_;
  DiscretizationSpec spec_;
  MarginConfig margin_;
  BoxBounds feasible_;
  int max_resamples_;
};

/// Weighted sphere over the first `d_co` encoded coordinates plus the number
/// of zero bits among the following `d_bi`.
inline double ellipsoid_onemax(const Vector& x_enc, int d_co, int d_bi) {
  detail::require(d_co >= 0 && d_bi >= 0 && x_enc.size() == d_co + d_bi,
                  "point dimension must equal d_co + d_bi");
  double f = 0.0;
  for (int j = 0; j < d_co; ++j) {
    const double coef = d_co > 1 ? std::pow(1000.0, static_cast<double>(j) / (d_co - 1)) : 1.0;
    const double t = coef * x_enc[j];
    f += t * t;
  }
  f += d_bi;
  for (int k = d_co; k < d_co + d_bi; ++k) f -= x_enc[k];
  return f;
}

}  // namespace cmaes
