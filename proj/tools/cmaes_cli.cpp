// Command-line harness: run, bench, record-baseline, fuzz, plot.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cmaes/bench/fuzz.hpp"
#include "cmaes/bench/quick_benchmark.hpp"
#include "cmaes/bench/runner.hpp"
#include "cmaes/bench/trajectory.hpp"

using namespace cmaes;
using namespace cmaes::bench;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

double to_double(const std::string& s, const std::string& flag) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ValidationError(flag + ": '" + s + "' is not a number");
}

/// "a,b,c" with one entry per dimension, or a single value for all of them.
Vector parse_vector(const std::string& s, int dim, const std::string& flag) {
  const auto parts = split(s, ',');
  if (parts.size() != 1 && static_cast<int>(parts.size()) != dim)
    throw ValidationError(flag + " needs 1 or " + std::to_string(dim) + " comma-separated values");
  Vector v(dim);
  for (int i = 0; i < dim; ++i) v[i] = to_double(parts[parts.size() == 1 ? 0 : i], flag);
  return v;
}

/// "lo:hi" for every coordinate, or "lo:hi,lo:hi,..." per coordinate.
BoxBounds parse_bounds(const std::string& s, int dim) {
  const auto parts = split(s, ',');
  if (parts.size() != 1 && static_cast<int>(parts.size()) != dim)
    throw ValidationError("--bounds needs 1 or " + std::to_string(dim) + " comma-separated lo:hi pairs");
  BoxBounds b = BoxBounds::unbounded(dim);
  for (int i = 0; i < dim; ++i) {
    const auto lh = split(parts[parts.size() == 1 ? 0 : i], ':');
    if (lh.size() != 2) throw ValidationError("--bounds entries must look like lo:hi");
    b.lower[i] = to_double(lh[0], "--bounds");
    b.upper[i] = to_double(lh[1], "--bounds");
  }
  return b;
}

struct RunFlags {
  std::string fn = "sphere";
  int dim = 2;
  std::uint64_t seed = 0;
  std::int64_t budget = 10000;
  int popsize = 0;
  double sigma0 = 1.0;
  std::string mean0, bounds, steps, shift, restart, save_state, resume_state, out;
  double margin = 0.0;
  double noise = 1.0;
  bool lr_adapt = false;
  bool no_stop = false;
  bool no_stagnation = false;
  bool sabotage = false;
};

void add_run_flags(CLI::App* app, RunFlags& f) {
  app->add_option("--fn", f.fn, "objective: " + bench::detail::joined_names());
  app->add_option("--dim", f.dim, "dimension")->check(CLI::PositiveNumber);
  app->add_option("--seed", f.seed, "sampling seed");
  app->add_option("--budget", f.budget, "evaluation budget (whole generations only)");
  app->add_option("--popsize", f.popsize, "population size (default 4 + floor(3 ln d))");
  app->add_option("--sigma0", f.sigma0, "initial step size");
  app->add_option("--mean0", f.mean0, "initial mean, one value or one per dimension");
  app->add_option("--bounds", f.bounds, "box bounds lo:hi, or one pair per dimension");
  app->add_option("--steps", f.steps, "discretization steps, 0 for continuous (enables margin)");
  app->add_option("--margin", f.margin, "margin alpha (default 1/(lambda d))");
  app->add_option("--shift", f.shift, "evaluate f(x - shift)");
  app->add_option("--noise", f.noise, "noise standard deviation of noisy_sphere");
  app->add_flag("--lr-adapt", f.lr_adapt, "learning-rate adaptation");
  app->add_option("--restart", f.restart, "restart strategy")->check(CLI::IsMember({"ipop"}));
  app->add_flag("--no-stop", f.no_stop, "ignore termination criteria and spend the whole budget");
  app->add_flag("--no-stagnation", f.no_stagnation, "disable the stagnation criterion");
  app->add_flag("--sabotage-no-cov", f.sabotage, "disable covariance learning (c_1 = c_mu = 0)");
  app->add_option("--save-state", f.save_state, "write the final optimizer state here");
  app->add_option("--resume-state", f.resume_state, "continue from a saved optimizer state");
}

RunConfig to_config(const RunFlags& f) {
  RunConfig c;
  c.fn = f.fn;
  c.dim = f.dim;
  c.seed = f.seed;
  c.budget = f.budget;
  if (f.popsize) c.popsize = f.popsize;
  c.sigma0 = f.sigma0;
  if (!f.mean0.empty()) c.mean0 = parse_vector(f.mean0, f.dim, "--mean0");
  if (!f.bounds.empty()) c.bounds = parse_bounds(f.bounds, f.dim);
  if (!f.steps.empty()) c.steps = parse_vector(f.steps, f.dim, "--steps");
  if (f.margin > 0) c.margin = f.margin;
  if (!f.shift.empty()) c.function.shift = parse_vector(f.shift, f.dim, "--shift");
  c.function.noise_sd = f.noise;
  c.lr_adapt = f.lr_adapt;
  c.restart_ipop = f.restart == "ipop";
  c.stop_on_termination = !f.no_stop;
  c.termination.stagnation = !f.no_stagnation;
  c.sabotage_covariance = f.sabotage;
  if (!f.save_state.empty()) c.save_state = f.save_state;
  if (!f.resume_state.empty()) c.resume_state = f.resume_state;
  return c;
}

int cmd_run(const RunFlags& f) {
  const RunConfig c = to_config(f);
  const RunRecord rec = run(c);
  if (f.out.empty() || f.out == "-") {
    write_csv(std::cout, rec, c.dim);
  } else {
    std::ofstream out(f.out);
    if (!out) throw Error("cannot write " + f.out);
    write_csv(out, rec, c.dim);
  }
  if (!rec.error.empty()) std::cerr << "run ended early: " << rec.error << '\n';
  if (rec.termination) std::cerr << "stopped: " << to_string(*rec.termination) << '\n';
  return 0;
}

int cmd_plot(const RunFlags& f) {
  RunConfig c = to_config(f);
  if (c.dim != 2) throw ValidationError("plot needs a 2-D problem (got --dim " + std::to_string(c.dim) + ")");
  c.record_frames = true;
  const RunRecord rec = run(c);
  const std::string dir = f.out.empty() ? "trajectory" : f.out;
  const auto files = emit_trajectory(rec.frames, make_function(c.fn, c.dim, c.function), dir);
  std::cout << "wrote " << files.size() << " files to " << dir << '\n';
  return 0;
}

int cmd_bench(const std::string& baseline, const std::string& out, bool sabotage) {
  const auto base = read_baseline(baseline);
  const BenchReport rep = compare(measure(default_suite(), sabotage), base);
  const std::string text = report_text(rep);
  std::cout << text;
  if (!out.empty()) {
    std::filesystem::create_directories(out);
    std::ofstream(out + "/report.txt") << text;
    std::ofstream(out + "/report.svg") << report_svg(rep);
  }
  return rep.pass ? 0 : 1;
}

int cmd_record(const std::string& out) {
  const auto results = measure(default_suite());
  write_baseline(out, results);
  for (const auto& r : results) std::cout << r.name << ' ' << r.median_evals << '\n';
  std::cout << "baseline written to " << out << '\n';
  return 0;
}

int cmd_fuzz(std::int64_t iterations, std::uint64_t seed) {
  const FuzzReport r = fuzz(iterations, seed);
  std::cout << "iterations " << r.iterations << ", calls " << r.calls << ", validation errors "
            << r.validation_errors << ", numerical errors " << r.numerical_errors << ", violations "
            << r.violations.size() << '\n';
  for (const auto& v : r.violations)
    std::cout << "violation at seed " << v.seed << " iteration " << v.iteration << ": " << v.message << '\n';
  return r.clean() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CMA-ES benchmark, regression, fuzz and plot harness"};
  app.require_subcommand(1);

  RunFlags run_flags, plot_flags;
  auto* run_cmd = app.add_subcommand("run", "run one optimization and print per-generation CSV");
  add_run_flags(run_cmd, run_flags);
  run_cmd->add_option("--out", run_flags.out, "CSV path (default stdout)");

  auto* plot_cmd = app.add_subcommand("plot", "run a 2-D problem and write SVG frames plus an animation");
  add_run_flags(plot_cmd, plot_flags);
  plot_cmd->add_option("--out", plot_flags.out, "output directory (default ./trajectory)");

  std::string baseline = "baseline.json", bench_out;
  bool bench_sabotage = false;
  auto* bench_cmd = app.add_subcommand("bench", "compare the quick benchmark against a stored baseline");
  bench_cmd->add_option("--baseline", baseline, "baseline JSON");
  bench_cmd->add_option("--out", bench_out, "directory for report.txt and report.svg");
  bench_cmd->add_flag("--sabotage-no-cov", bench_sabotage, "disable covariance learning (gate self-check)");

  std::string record_out = "baseline.json";
  auto* record_cmd = app.add_subcommand("record-baseline", "measure the quick benchmark and store it");
  record_cmd->add_option("--out", record_out, "baseline JSON to write");

  std::int64_t iterations = 10000;
  std::uint64_t fuzz_seed = 0;
  auto* fuzz_cmd = app.add_subcommand("fuzz", "randomized robustness campaign");
  fuzz_cmd->add_option("--iterations", iterations, "number of random sequences")->check(CLI::NonNegativeNumber);
  fuzz_cmd->add_option("--seed", fuzz_seed, "campaign seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) return cmd_run(run_flags);
    if (*plot_cmd) return cmd_plot(plot_flags);
    if (*bench_cmd) return cmd_bench(baseline, bench_out, bench_sabotage);
    if (*record_cmd) return cmd_record(record_out);
    if (*fuzz_cmd) return cmd_fuzz(iterations, fuzz_seed);
  } catch (const ValidationError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
