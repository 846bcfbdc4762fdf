#pragma once

#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <string>
#include <vector>

#include "cmaes/cma.hpp"
#include "cmaes/cmawm.hpp"
#include "cmaes/state_io.hpp"

namespace cmaes::bench {

struct FuzzViolation {
  std::uint64_t seed = 0;
  std::int64_t iteration = 0;
  std::string message;
};

struct FuzzReport {
  std::int64_t iterations = 0;
  std::int64_t calls = 0;
  std::int64_t validation_errors = 0;
  std::int64_t numerical_errors = 0;
  std::vector<FuzzViolation> violations;

  bool clean() const { return violations.empty(); }
};

namespace detail {

inline double fuzz_scalar(Rng& r) {
  switch (r.integer(0, 9)) {
    case 0: return 0.0;
    case 1: return std::ldexp(r.uniform(-1.0, 1.0), static_cast<int>(r.integer(-1000, 1000)));
    case 2: return r.uniform() < 0.5 ? 1e300 : -1e300;
    default: return r.uniform(-10.0, 10.0);
  }
}

inline double fuzz_value(Rng& r) {
  switch (r.integer(0, 19)) {
    case 0: return std::numeric_limits<double>::quiet_NaN();
    case 1: return std::numeric_limits<double>::infinity();
    case 2: return -std::numeric_limits<double>::infinity();
    case 3: return 0.0;
    default: return fuzz_scalar(r);
  }
}

inline double fuzz_sigma(Rng& r) {
  switch (r.integer(0, 19)) {
    case 0: return 1e-16;
    case 1: return 0.0;
    case 2: return -1.0;
    case 3: return std::numeric_limits<double>::quiet_NaN();
    case 4: return std::numeric_limits<double>::infinity();
    default: return std::pow(10.0, r.uniform(-16.0, 16.0));
  }
}

inline const CMA& as_cma(const CMA& c) { return c; }
inline const CMA& as_cma(const CMAwM& c) { return c.cma(); }

inline void check_state(const CMA& c) {
  const auto& s = c.state();
  if (!(std::isfinite(s.sigma) && s.sigma > 0.0)) throw std::logic_error("sigma left (0, inf)");
  if (!s.mean.allFinite()) throw std::logic_error("mean is not finite");
  if (!s.cov.allFinite()) throw std::logic_error("covariance is not finite");
  if (s.cov != s.cov.transpose()) throw std::logic_error("covariance lost symmetry");
}

/// One randomized construction / ask / tell sequence. Library errors
/// propagate; anything else in here is a contract violation.
inline void fuzz_one(Rng& r, FuzzReport& rep) {
  const int dim = static_cast<int>(r.integer(1, 12));
  Vector mean(dim);
  const bool extreme = r.uniform() < 0.2;
  for (int i = 0; i < dim; ++i) mean[i] = r.uniform() < 0.03 ? fuzz_value(r) : (extreme ? fuzz_scalar(r) : r.uniform(-5, 5));
  const double sigma = fuzz_sigma(r);

  CmaOptions opts;
  if (r.uniform() < 0.3) opts.population_size = static_cast<int>(r.integer(0, 30));
  opts.seed = r();
  opts.lr_adapt = r.uniform() < 0.25;
  const bool mixed = r.uniform() < 0.25;

  auto run_tells = [&](auto& opt, auto ask_tell_point) {
    const int gens = static_cast<int>(r.integer(1, 6));
    for (int g = 0; g < gens; ++g) {
      const int lambda = opt.population_size();
      std::vector<EvaluatedSolution> batch;
      for (int k = 0; k < lambda; ++k) {
        ++rep.calls;
        batch.push_back({ask_tell_point(opt), r.uniform(-1, 1)});
      }
      switch (r.integer(0, 9)) {
        case 0: batch.pop_back(); break;
        case 1: batch.push_back(batch.front()); break;
        case 2: batch[static_cast<std::size_t>(r.integer(0, lambda - 1))].value = fuzz_value(r); break;
        case 3:
          for (auto& b : batch) b = batch.front();
          break;
        case 4:
          for (auto& b : batch)
            for (Eigen::Index i = 0; i < b.x.size(); ++i) b.x[i] = fuzz_scalar(r);
          break;
        case 5: batch.front().x = Vector::Zero(dim + 1); break;
        case 6: batch.clear(); break;
        default: break;
      }
      ++rep.calls;
      opt.tell(batch);
      check_state(as_cma(opt));
      if (r.uniform() < 0.5) {
        ++rep.calls;
        (void)opt.should_stop();
      }
    }
    if (r.uniform() < 0.3) {
      ++rep.calls;
      const auto bytes = state_io::save(opt);
      const Snapshot back = state_io::decode(bytes);
      if (state_io::encode(back) != bytes) throw std::logic_error("snapshot roundtrip changed the bytes");
    }
  };

  ++rep.calls;
  if (mixed) {
    BoxBounds b = BoxBounds::unbounded(dim);
    Vector steps = Vector::Zero(dim);
    for (int i = 0; i < dim; ++i)
      if (r.uniform() < 0.5) {
        b.lower[i] = static_cast<double>(r.integer(-3, 0));
        b.upper[i] = b.lower[i] + static_cast<double>(r.integer(0, 4));
        steps[i] = 1.0;
      }
    CMAwM opt(mean, sigma, b, steps, opts);
    run_tells(opt, [](CMAwM& o) { return o.ask().second; });
  } else {
    CMA opt(mean, sigma, opts);
    run_tells(opt, [](CMA& o) { return o.ask(); });
  }
}

}  // namespace detail

/// Randomized robustness check: every public call must either succeed or
/// throw ValidationError / NumericalError. Each iteration draws from its own
/// stream seeded by (seed, iteration) so violations are reproducible.
inline FuzzReport fuzz(std::int64_t iterations, std::uint64_t seed) {
  FuzzReport rep;
  for (std::int64_t it = 0; it < iterations; ++it) {
    Rng r(seed * 0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(it));
    ++rep.iterations;
    try {
      detail::fuzz_one(r, rep);
    } catch (const ValidationError&) {
      ++rep.validation_errors;
    } catch (const NumericalError&) {
      ++rep.numerical_errors;
    } catch (const std::exception& e) {
      rep.violations.push_back({seed, it, e.what()});
    } catch (...) {
      rep.violations.push_back({seed, it, "non-standard exception"});
    }
  }
  return rep;
}

}  // namespace cmaes::bench
