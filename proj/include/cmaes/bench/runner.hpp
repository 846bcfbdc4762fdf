#pragma once

#include <cstdint>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "cmaes/bench/functions.hpp"
#include "cmaes/bounds.hpp"
#include "cmaes/cma.hpp"
#include "cmaes/cmawm.hpp"
#include "cmaes/restart.hpp"
#include "cmaes/state_io.hpp"

namespace cmaes::bench {

/// Everything a single benchmark run depends on.
struct RunConfig {
  std::string fn = "sphere";
  int dim = 2;
  std::uint64_t seed = 0;
  std::int64_t budget = 10000;  // evaluations; only whole generations are run
  std::optional<int> popsize;
  double sigma0 = 1.0;
  std::optional<Vector> mean0;  // zeros when absent
  std::optional<BoxBounds> bounds;
  std::optional<Vector> steps;  // enables margin correction
  std::optional<double> margin;
  bool lr_adapt = false;
  bool restart_ipop = false;
  bool stop_on_termination = true;
  TerminationConfig termination;
  bool record_frames = false;
  bool sabotage_covariance = false;  // c_1 = c_mu = 0, for regression-gate checks
  FunctionOptions function;
  std::optional<std::string> save_state;
  std::optional<std::string> resume_state;

  /// Short stable description of the settings that affect the trajectory.
  std::string fingerprint() const {
    std::ostringstream s;
    s << fn << "/d" << dim << "/seed" << seed << "/budget" << budget << "/lambda"
      << (popsize ? std::to_string(*popsize) : std::string("default")) << "/sigma"
      << std::setprecision(17) << sigma0;
    if (lr_adapt) s << "/lra";
    if (steps) s << "/margin";
    if (restart_ipop) s << "/ipop";
    if (bounds) s << "/bounded";
    if (sabotage_covariance) s << "/nocov";
    if (!termination.stagnation) s << "/nostagnation";
    if (resume_state) s << "/resumed";
    return s.str();
  }
};

struct RunRow {
  std::int64_t generation = 0;
  std::int64_t evaluations = 0;
  double best_value = 0.0;
  double sigma = 0.0;
  double eig_min = 0.0;
  double eig_max = 0.0;
  Vector mean;
};

/// Distribution of one generation for plotting.
struct TrajectoryFrame {
  std::int64_t generation = 0;
  Vector mean;
  Matrix cov;  // sigma^2 C
  std::vector<Vector> population;
};

struct RunRecord {
  std::vector<RunRow> rows;
  std::uint64_t seed = 0;
  std::string fingerprint;
  EvaluatedSolution best{Vector(), std::numeric_limits<double>::infinity()};
  Vector best_x_encoded;
  std::optional<TerminationReason> termination;
  std::string error;  // numerical failure that ended the run, if any
  int restarts = 0;
  std::vector<TrajectoryFrame> frames;
};

namespace detail {

/// Vanilla or margin-corrected optimizer behind one ask/tell surface.
class Optimizer {
 public:
  explicit Optimizer(CMA c, std::optional<BoxBounds> bounds) : impl_(std::move(c)), bounds_(std::move(bounds)) {}
  explicit Optimizer(CMAwM c) : impl_(std::move(c)) {}

  CMA& core() { return std::visit([](auto& o) -> CMA& { return as_core(o); }, impl_); }
  int population_size() { return core().population_size(); }

  /// (x_eval, x_tell); identical for vanilla runs.
  std::pair<Vector, Vector> ask() {
    if (auto* wm = std::get_if<CMAwM>(&impl_)) return wm->ask();
    CMA& c = std::get<CMA>(impl_);
    Vector x = bounds_ ? ask_feasible(c, *bounds_) : c.ask();
    return {x, x};
  }

  void tell(std::span<const EvaluatedSolution> s) {
    std::visit([&](auto& o) { o.tell(s); }, impl_);
  }

  state_io::Bytes save() const {
    return std::visit([](const auto& o) { return state_io::save(o); }, impl_);
  }

 private:
  static CMA& as_core(CMA& c) { return c; }
  static CMA& as_core(CMAwM& c) { return c.cma(); }

  std::variant<CMA, CMAwM> impl_;
  std::optional<BoxBounds> bounds_;
};

}  // namespace detail

/// Execute the ask / evaluate / tell loop described by `cfg`.
inline RunRecord run(const RunConfig& cfg) {
  using cmaes::detail::require;
  require(cfg.budget >= 0, "budget must be non-negative");
  const BenchmarkFunction fn = make_function(cfg.fn, cfg.dim, cfg.function);
  if (cfg.bounds) cfg.bounds->validate(cfg.dim);
  require(!(cfg.restart_ipop && cfg.steps), "restarts are not supported together with margin correction");
  require(!(cfg.restart_ipop && cfg.resume_state), "restarts cannot resume from a snapshot");

  Rng noise(cfg.seed ^ 0x5bd1e9955bd1e995ULL);
  Rng restart_rng(cfg.seed ^ 0x2545f4914f6cdd1dULL);

  auto make_core = [&](Vector mean, std::optional<int> popsize, std::uint64_t seed) {
    CmaOptions o;
    o.population_size = popsize;
    o.seed = seed;
    o.lr_adapt = cfg.lr_adapt;
    o.termination = cfg.termination;
    if (cfg.sabotage_covariance) {
      HyperParams hp = default_hyperparams(cfg.dim, popsize);
      hp.c_1 = 0.0;
      hp.c_mu = 0.0;
      o.hyperparams = hp;
    }
    return CMA(std::move(mean), cfg.sigma0, o);
  };
  auto make = [&](Vector mean, std::optional<int> popsize, std::uint64_t seed) {
    if (cfg.steps) {
      CmaOptions o;
      o.population_size = popsize;
      o.seed = seed;
      o.lr_adapt = cfg.lr_adapt;
    o.termination = cfg.termination;
      BoxBounds b = cfg.bounds ? *cfg.bounds : BoxBounds::unbounded(cfg.dim);
      return detail::Optimizer(CMAwM(std::move(mean), cfg.sigma0, std::move(b), *cfg.steps, o, cfg.margin));
    }
    return detail::Optimizer(make_core(std::move(mean), popsize, seed), cfg.bounds);
  };

  auto optimizer = [&]() -> detail::Optimizer {
    if (cfg.resume_state) {
      const auto bytes = state_io::read_file(*cfg.resume_state);
      const Snapshot snap = state_io::decode(bytes);
      if (snap.margin) return detail::Optimizer(CMAwM::restore(snap));
      return detail::Optimizer(CMA::restore(snap), cfg.bounds);
    }
    const Vector mean0 = cfg.mean0 ? *cfg.mean0 : Vector::Zero(cfg.dim);
    require(mean0.size() == cfg.dim, "mean0 must have one entry per dimension");
    return make(mean0, cfg.popsize, cfg.seed);
  }();

  RunRecord rec;
  rec.seed = cfg.seed;
  rec.fingerprint = cfg.fingerprint();
  if (cfg.resume_state) rec.best.value = optimizer.core().history().best_ever;

  std::int64_t evaluations = 0;
  std::int64_t total_evals = optimizer.core().generation() * optimizer.population_size();
  int popsize = optimizer.population_size();
  std::vector<EvaluatedSolution> batch;

  while (evaluations + optimizer.population_size() <= cfg.budget) {
    CMA& core = optimizer.core();
    TrajectoryFrame frame;
    if (cfg.record_frames) {
      frame.generation = core.generation();
      frame.mean = core.state().mean;
      frame.cov = core.state().sigma * core.state().sigma * core.state().cov;
    }
    batch.clear();
    try {
      for (int k = 0; k < optimizer.population_size(); ++k) {
        auto [x_eval, x_tell] = optimizer.ask();
        const Vector x_in = fn.discretization && !cfg.steps ? encode(x_eval, *fn.discretization) : x_eval;
        const double v = fn(x_in, &noise);
        if (v < rec.best.value) {
          rec.best = {x_tell, v};
          rec.best_x_encoded = x_in;
        }
        if (cfg.record_frames) frame.population.push_back(x_in);
        batch.push_back({std::move(x_tell), v});
      }
      evaluations += optimizer.population_size();
      total_evals += optimizer.population_size();
      optimizer.tell(batch);
    } catch (const NumericalError& e) {
      rec.error = e.what();
      break;
    } catch (const ValidationError& e) {
      // Only the objective values can be invalid here (non-finite results).
      rec.error = e.what();
      break;
    }
    if (cfg.record_frames) rec.frames.push_back(std::move(frame));

    CMA& after = optimizer.core();
    const EigenCache& eig = after.eigen();
    RunRow row;
    row.generation = after.generation();
    row.evaluations = total_evals;
    row.best_value = rec.best.value;
    row.sigma = after.state().sigma;
    row.eig_min = eig.D.minCoeff() * eig.D.minCoeff();
    row.eig_max = eig.D.maxCoeff() * eig.D.maxCoeff();
    row.mean = after.state().mean;
    rec.rows.push_back(std::move(row));

    if (!cfg.stop_on_termination && !cfg.restart_ipop) continue;
    const auto reason = after.should_stop();
    if (!reason) continue;
    if (!cfg.restart_ipop) {
      rec.termination = reason;
      break;
    }
    ++rec.restarts;
    popsize *= 2;
    const BoxBounds init = cfg.bounds ? *cfg.bounds : BoxBounds::uniform(cfg.dim, -5.0, 5.0);
    Vector m(cfg.dim);
    for (int i = 0; i < cfg.dim; ++i) {
      const double lo = std::isfinite(init.lower[i]) ? init.lower[i] : -5.0;
      const double hi = std::isfinite(init.upper[i]) ? init.upper[i] : 5.0;
      m[i] = restart_rng.uniform(lo, hi);
    }
    optimizer = make(std::move(m), popsize, restart_rng());
  }

  if (cfg.save_state) state_io::write_file(*cfg.save_state, optimizer.save());
  return rec;
}

/// CSV with a header row and one row per generation, 17 significant digits.
inline void write_csv(std::ostream& out, const RunRecord& rec, int dim) {
  out << "generation,evaluations,best_value,sigma,eig_min,eig_max";
  for (int i = 0; i < dim; ++i) out << ",m" << i;
  out << '\n';
  out << std::setprecision(17);
  for (const auto& r : rec.rows) {
    out << r.generation << ',' << r.evaluations << ',' << r.best_value << ',' << r.sigma << ','
        << r.eig_min << ',' << r.eig_max;
    for (Eigen::Index i = 0; i < r.mean.size(); ++i) out << ',' << r.mean[i];
    out << '\n';
  }
}

}  // namespace cmaes::bench
