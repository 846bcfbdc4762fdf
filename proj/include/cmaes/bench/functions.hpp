#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "cmaes/cmawm.hpp"
#include "cmaes/errors.hpp"
#include "cmaes/rng.hpp"
#include "cmaes/types.hpp"

namespace cmaes::bench {

/// An objective with its known optimum. `noise` is the dedicated noise
/// stream; deterministic functions ignore it.
struct BenchmarkFunction {
  std::string name;
  int dim = 0;
  std::function<double(const Vector&, Rng* noise)> evaluate;
  std::optional<double> optimum_value;
  std::optional<Vector> optimum_x;
  std::optional<Matrix> rotation;
  double noise_variance = 0.0;
  // Mixed-integer problems evaluate encoded points; vanilla runs encode with
  // this spec before evaluating.
  std::optional<DiscretizationSpec> discretization;

  double operator()(const Vector& x, Rng* noise = nullptr) const { return evaluate(x, noise); }
};

struct FunctionOptions {
  std::optional<Vector> shift;  // evaluate f(x - shift)
  double noise_sd = 1.0;        // noisy_sphere only
  double rotation_angle = std::numbers::pi / 6.0;
};

inline double sphere(const Vector& x) { return x.squaredNorm(); }

/// Axis-scaled quadratic: x1^2 + (10 x2)^2 in two dimensions, otherwise
/// coefficients 1000^((j-1)/(d-1)) inside the square.
inline double ellipsoid(const Vector& x) {
  const auto d = x.size();
  if (d == 1) return x[0] * x[0];
  if (d == 2) return x[0] * x[0] + (10.0 * x[1]) * (10.0 * x[1]);
  double f = 0.0;
  for (Eigen::Index j = 0; j < d; ++j) {
    const double t = std::pow(1000.0, static_cast<double>(j) / static_cast<double>(d - 1)) * x[j];
    f += t * t;
  }
  return f;
}

inline double rastrigin(const Vector& x) {
  double f = 10.0 * static_cast<double>(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i)
    f += x[i] * x[i] - 10.0 * std::cos(2.0 * std::numbers::pi * x[i]);
  return f;
}

/// Rotation by `angle` in the (x1, x2) plane, identity on the other axes.
inline Matrix plane_rotation(int dim, double angle) {
  Matrix r = Matrix::Identity(dim, dim);
  if (dim >= 2) {
    r(0, 0) = std::cos(angle);
    r(0, 1) = -std::sin(angle);
    r(1, 0) = std::sin(angle);
    r(1, 1) = std::cos(angle);
  }
  return r;
}

inline const std::vector<std::string>& function_names() {
  static const std::vector<std::string> names = {"sphere",    "ellipsoid",    "rotated_ellipsoid",
                                                 "rastrigin", "noisy_sphere", "ellipsoid_onemax"};
  return names;
}

namespace detail {
inline std::string joined_names() {
  std::string s;
  for (const auto& n : function_names()) s += (s.empty() ? "" : ", ") + n;
  return s;
}
}  // namespace detail

/// Look up a standard function by name.
inline BenchmarkFunction make_function(const std::string& name, int dim, const FunctionOptions& opts = {}) {
  cmaes::detail::require(dim >= 1, "dimension must be >= 1");
  const Vector shift = opts.shift ? *opts.shift : Vector::Zero(dim);
  cmaes::detail::require(shift.size() == dim, "shift must have one entry per dimension");

  BenchmarkFunction f;
  f.name = name;
  f.dim = dim;
  f.optimum_value = 0.0;
  f.optimum_x = shift;
  if (name == "sphere") {
    f.evaluate = [shift](const Vector& x, Rng*) { return sphere(x - shift); };
  } else if (name == "ellipsoid") {
    f.evaluate = [shift](const Vector& x, Rng*) { return ellipsoid(x - shift); };
  } else if (name == "rotated_ellipsoid") {
    const Matrix r = plane_rotation(dim, opts.rotation_angle);
    f.rotation = r;
    f.evaluate = [shift, r](const Vector& x, Rng*) { return ellipsoid(r * (x - shift)); };
  } else if (name == "rastrigin") {
    f.evaluate = [shift](const Vector& x, Rng*) { return rastrigin(x - shift); };
  } else if (name == "noisy_sphere") {
    const double sd = opts.noise_sd;
    cmaes::detail::require(std::isfinite(sd) && sd >= 0.0, "noise level must be non-negative");
    f.noise_variance = sd * sd;
    f.evaluate = [shift, sd](const Vector& x, Rng* noise) {
      const double clean = sphere(x - shift);
      return noise ? clean + sd * noise->normal() : clean;
    };
  } else if (name == "ellipsoid_onemax") {
    cmaes::detail::require(dim >= 2, "ellipsoid_onemax needs at least two dimensions");
    const int d_co = dim / 2;
    const int d_bi = dim - d_co;
    BoxBounds b = BoxBounds::unbounded(dim);
    Vector steps = Vector::Zero(dim);
    for (int i = d_co; i < dim; ++i) {
      b.lower[i] = 0.0;
      b.upper[i] = 1.0;
      steps[i] = 1.0;
    }
    f.discretization = DiscretizationSpec(b, steps);
    Vector opt = Vector::Zero(dim);
    opt.tail(d_bi).setOnes();
    opt.head(d_co) = shift.head(d_co);
    f.optimum_x = opt;
    f.evaluate = [shift, d_co, d_bi](const Vector& x_enc, Rng*) {
      Vector x = x_enc;
      x.head(d_co) -= shift.head(d_co);
      return ellipsoid_onemax(x, d_co, d_bi);
    };
  } else {
    throw ValidationError("unknown function '" + name + "'; available: " + detail::joined_names());
  }
  return f;
}

}  // namespace cmaes::bench

namespace cmaes::bench {

/// Every standard function instantiated at `dim` (ellipsoid_onemax is skipped
/// when dim < 2).
inline std::vector<BenchmarkFunction> standard_functions(int dim, const FunctionOptions& opts = {}) {
  std::vector<BenchmarkFunction> out;
  for (const auto& n : function_names()) {
    if (n == "ellipsoid_onemax" && dim < 2) continue;
    out.push_back(make_function(n, dim, opts));
  }
  return out;
}

}  // namespace cmaes::bench
