#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cmaes/bench/runner.hpp"

namespace cmaes::bench {

/// One function of the regression suite. A seed that never reaches the
/// target counts as max_evals + 1 evaluations.
struct BenchCase {
  std::string name;  // unique label, also the baseline key
  std::string fn;
  int dim = 2;
  double target = 1e-8;
  double sigma0 = 1.0;
  double mean0 = 1.0;  // broadcast to every coordinate
  std::optional<int> popsize;
  std::int64_t max_evals = 20000;
};

struct BenchSuite {
  std::vector<BenchCase> cases;
  std::vector<std::uint64_t> seeds;
};

inline BenchSuite default_suite() {
  BenchSuite s;
  s.cases = {
      {"sphere-10d", "sphere", 10, 1e-8, 1.0, 1.0, std::nullopt, 20000},
      {"ellipsoid-5d", "ellipsoid", 5, 1e-8, 1.0, 1.0, std::nullopt, 30000},
      {"rotated-ellipsoid-2d", "rotated_ellipsoid", 2, 1e-10, 1.0, 1.0, 15, 20000},
  };
  for (std::uint64_t i = 0; i < 11; ++i) s.seeds.push_back(1000 + i);
  return s;
}

/// Evaluations until the best value first drops below the target.
inline std::int64_t evaluations_to_target(const BenchCase& c, std::uint64_t seed, bool sabotage = false) {
  RunConfig cfg;
  cfg.fn = c.fn;
  cfg.dim = c.dim;
  cfg.seed = seed;
  cfg.budget = c.max_evals;
  cfg.popsize = c.popsize;
  cfg.sigma0 = c.sigma0;
  cfg.mean0 = Vector::Constant(c.dim, c.mean0);
  cfg.sabotage_covariance = sabotage;
  const RunRecord rec = run(cfg);
  for (const auto& r : rec.rows)
    if (r.best_value < c.target) return r.evaluations;
  return c.max_evals + 1;
}

struct CaseResult {
  std::string name;
  double median_evals = 0.0;
  std::optional<double> baseline;
  bool pass = true;
};

struct BenchReport {
  std::vector<CaseResult> cases;
  std::vector<std::string> warnings;
  bool pass = true;
  double tolerance = 0.25;
};

inline double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Median evaluations-to-target per case.
inline std::vector<CaseResult> measure(const BenchSuite& suite, bool sabotage = false) {
  std::vector<CaseResult> out;
  for (const auto& c : suite.cases) {
    std::vector<double> evals;
    for (auto seed : suite.seeds) evals.push_back(static_cast<double>(evaluations_to_target(c, seed, sabotage)));
    out.push_back({c.name, median(evals), std::nullopt, true});
  }
  return out;
}

inline nlohmann::json baseline_json(const std::vector<CaseResult>& results) {
  nlohmann::json j;
  j["format"] = 1;
  j["cases"] = nlohmann::json::object();
  for (const auto& r : results) j["cases"][r.name] = r.median_evals;
  return j;
}

inline void write_baseline(const std::string& path, const std::vector<CaseResult>& results) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write baseline " + path);
  out << baseline_json(results).dump(2) << '\n';
}

inline nlohmann::json read_baseline(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw Error("no baseline found at '" + path +
                "'; record one first with: cmaes_cli record-baseline --out " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error("baseline '" + path + "' is not valid JSON: " + e.what());
  }
}

/// Fail any case whose median exceeds its baseline by more than `tolerance`.
inline BenchReport compare(std::vector<CaseResult> results, const nlohmann::json& baseline,
                           double tolerance = 0.25) {
  BenchReport rep;
  rep.tolerance = tolerance;
  if (results.empty()) rep.warnings.push_back("benchmark suite is empty; nothing was compared");
  const auto& cases = baseline.contains("cases") ? baseline["cases"] : nlohmann::json::object();
  for (auto& r : results) {
    if (cases.contains(r.name) && cases[r.name].is_number()) {
      r.baseline = cases[r.name].get<double>();
      r.pass = r.median_evals <= (1.0 + tolerance) * *r.baseline;
    } else {
      rep.warnings.push_back("case '" + r.name + "' has no baseline entry");
      r.pass = false;
    }
    rep.pass = rep.pass && r.pass;
  }
  rep.cases = std::move(results);
  return rep;
}

inline std::string report_text(const BenchReport& rep) {
  std::ostringstream s;
  s << "quick benchmark: " << (rep.pass ? "PASS" : "FAIL") << " (tolerance +"
    << static_cast<int>(rep.tolerance * 100) << "%)\n";
  for (const auto& w : rep.warnings) s << "warning: " << w << '\n';
  for (const auto& c : rep.cases) {
    s << (c.pass ? "  ok   " : "  FAIL ") << std::left << std::setw(24) << c.name << " median evals "
      << c.median_evals;
    if (c.baseline) s << " (baseline " << *c.baseline << ")";
    s << '\n';
  }
  return s.str();
}

/// Bar chart of current vs baseline medians.
inline std::string report_svg(const BenchReport& rep) {
  const int bar_h = 18, gap = 14, left = 190, width = 640;
  const int height = 40 + static_cast<int>(rep.cases.size()) * (2 * bar_h + gap);
  double top = 1.0;
  for (const auto& c : rep.cases) top = std::max({top, c.median_evals, c.baseline.value_or(0.0)});
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<text x=\"10\" y=\"20\">quick benchmark " << (rep.pass ? "PASS" : "FAIL")
    << " (grey = baseline, colour = current)</text>\n";
  int y = 35;
  for (const auto& c : rep.cases) {
    const double scale = (width - left - 20) / top;
    s << "<text x=\"10\" y=\"" << y + bar_h << "\">" << c.name << "</text>\n";
    if (c.baseline)
      s << "<rect x=\"" << left << "\" y=\"" << y << "\" width=\"" << *c.baseline * scale << "\" height=\""
        << bar_h << "\" fill=\"#bbb\"/>\n";
    s << "<rect x=\"" << left << "\" y=\"" << y + bar_h << "\" width=\"" << c.median_evals * scale
      << "\" height=\"" << bar_h << "\" fill=\"" << (c.pass ? "#3a7" : "#d33") << "\"/>\n";
    y += 2 * bar_h + gap;
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace cmaes::bench
