#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "cmaes/bench/functions.hpp"
#include "cmaes/bench/runner.hpp"

namespace cmaes::bench {

/// 1-sigma ellipse of a 2-D Gaussian. `angle` is the direction of the major
/// axis in (-pi/2, pi/2].
struct Ellipse {
  double cx = 0.0, cy = 0.0;
  double major = 0.0, minor = 0.0;
  double angle = 0.0;
};

inline void detail_require_2d(Eigen::Index d) {
  cmaes::detail::require(d == 2, "trajectory plots need a two-dimensional problem");
}

inline double wrap_half_turn(double a) {
  while (a > std::numbers::pi / 2) a -= std::numbers::pi;
  while (a <= -std::numbers::pi / 2) a += std::numbers::pi;
  return a;
}

inline Ellipse ellipse_of(const Vector& mean, const Matrix& cov) {
  detail_require_2d(mean.size());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov.topLeftCorner<2, 2>());
  const Eigen::Vector2d ev = es.eigenvalues().cwiseMax(0.0);
  const Eigen::Vector2d major_dir = es.eigenvectors().col(1);
  return {mean[0], mean[1], std::sqrt(ev[1]), std::sqrt(ev[0]),
          wrap_half_turn(std::atan2(major_dir[1], major_dir[0]))};
}

struct ViewBox {
  double xmin = -1, xmax = 1, ymin = -1, ymax = 1;
};

inline ViewBox fit_view(const std::vector<TrajectoryFrame>& frames) {
  ViewBox v{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
            std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  auto take = [&](double x, double y) {
    if (!std::isfinite(x) || !std::isfinite(y)) return;
    v.xmin = std::min(v.xmin, x);
    v.xmax = std::max(v.xmax, x);
    v.ymin = std::min(v.ymin, y);
    v.ymax = std::max(v.ymax, y);
  };
  for (const auto& f : frames) {
    const Ellipse e = ellipse_of(f.mean, f.cov);
    take(e.cx - e.major, e.cy - e.major);
    take(e.cx + e.major, e.cy + e.major);
    for (const auto& p : f.population) take(p[0], p[1]);
  }
  if (!(v.xmax > v.xmin)) v.xmin -= 1, v.xmax += 1;
  if (!(v.ymax > v.ymin)) v.ymin -= 1, v.ymax += 1;
  const double pad_x = 0.08 * (v.xmax - v.xmin), pad_y = 0.08 * (v.ymax - v.ymin);
  return {v.xmin - pad_x, v.xmax + pad_x, v.ymin - pad_y, v.ymax + pad_y};
}

/// Marching-squares contour segments of `f` over `view`, in world coordinates.
inline std::vector<std::array<double, 4>> contour_segments(const BenchmarkFunction& f, const ViewBox& view,
                                                           int grid = 64, int levels = 10) {
  std::vector<double> vals(static_cast<std::size_t>((grid + 1) * (grid + 1)));
  const double dx = (view.xmax - view.xmin) / grid, dy = (view.ymax - view.ymin) / grid;
  auto at = [&](int i, int j) -> double& { return vals[static_cast<std::size_t>(j * (grid + 1) + i)]; };
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  Vector p(2);
  for (int j = 0; j <= grid; ++j)
    for (int i = 0; i <= grid; ++i) {
      p << view.xmin + i * dx, view.ymin + j * dy;
      const double v = std::log1p(std::max(0.0, f(p)));
      at(i, j) = v;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  std::vector<std::array<double, 4>> segs;
  if (!(hi > lo)) return segs;
  for (int l = 1; l <= levels; ++l) {
    const double iso = lo + (hi - lo) * l / (levels + 1.0);
    for (int j = 0; j < grid; ++j)
      for (int i = 0; i < grid; ++i) {
        const double c[4] = {at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)};
        const double px[4] = {0, 1, 1, 0}, py[4] = {0, 0, 1, 1};
        std::vector<std::array<double, 2>> cross;
        for (int e = 0; e < 4; ++e) {
          const int a = e, b = (e + 1) % 4;
          if ((c[a] < iso) == (c[b] < iso)) continue;
          const double t = (iso - c[a]) / (c[b] - c[a]);
          cross.push_back({view.xmin + (i + px[a] + t * (px[b] - px[a])) * dx,
                           view.ymin + (j + py[a] + t * (py[b] - py[a])) * dy});
        }
        for (std::size_t k = 0; k + 1 < cross.size(); k += 2)
          segs.push_back({cross[k][0], cross[k][1], cross[k + 1][0], cross[k + 1][1]});
      }
  }
  return segs;
}

namespace detail {

struct Canvas {
  ViewBox view;
  double size = 480;
  double sx(double x) const { return (x - view.xmin) / (view.xmax - view.xmin) * size; }
  double sy(double y) const { return size - (y - view.ymin) / (view.ymax - view.ymin) * size; }
};

inline std::string frame_body(const TrajectoryFrame& f, const Canvas& cv) {
  std::ostringstream s;
  s << std::setprecision(6);
  const Ellipse e = ellipse_of(f.mean, f.cov);
  for (const auto& p : f.population)
    s << "<circle cx=\"" << cv.sx(p[0]) << "\" cy=\"" << cv.sy(p[1]) << "\" r=\"3\" fill=\"#d22\"/>";
  const double rx = e.major / (cv.view.xmax - cv.view.xmin) * cv.size;
  const double ry = e.minor / (cv.view.ymax - cv.view.ymin) * cv.size;
  s << "<ellipse cx=\"" << cv.sx(e.cx) << "\" cy=\"" << cv.sy(e.cy) << "\" rx=\"" << rx << "\" ry=\"" << ry
    << "\" transform=\"rotate(" << -e.angle * 180.0 / std::numbers::pi << ' ' << cv.sx(e.cx) << ' '
    << cv.sy(e.cy) << ")\" fill=\"none\" stroke=\"#15c\" stroke-width=\"2\"/>";
  s << "<text x=\"8\" y=\"16\" font-family=\"monospace\" font-size=\"12\">generation " << f.generation
    << "</text>";
  return s.str();
}

inline std::string contours_svg(const std::vector<std::array<double, 4>>& segs, const Canvas& cv) {
  std::ostringstream s;
  s << std::setprecision(6) << "<path fill=\"none\" stroke=\"#999\" stroke-width=\"0.7\" d=\"";
  for (const auto& g : segs) s << 'M' << cv.sx(g[0]) << ' ' << cv.sy(g[1]) << 'L' << cv.sx(g[2]) << ' ' << cv.sy(g[3]);
  s << "\"/>";
  return s.str();
}

inline std::string svg_open(const Canvas& cv) {
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << cv.size << "\" height=\"" << cv.size
    << "\" viewBox=\"0 0 " << cv.size << ' ' << cv.size << "\"><rect width=\"100%\" height=\"100%\" fill=\"white\"/>";
  return s.str();
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p);
  if (!out) throw Error("cannot write " + p.string());
  out << text;
}

}  // namespace detail

/// Write frame_NNNN.svg per generation (contours, population, 1-sigma
/// ellipse) and, when `animate` is set, one animated SVG cycling through
/// them. Returns the written paths.
inline std::vector<std::string> emit_trajectory(const std::vector<TrajectoryFrame>& frames,
                                                const BenchmarkFunction& fn, const std::string& out_dir,
                                                bool animate = true, double seconds_per_frame = 0.1) {
  detail_require_2d(fn.dim);
  std::vector<std::string> written;
  if (frames.empty()) return written;
  std::filesystem::create_directories(out_dir);
  detail::Canvas cv{fit_view(frames)};
  const std::string contours = detail::contours_svg(contour_segments(fn, cv.view), cv);

  for (std::size_t k = 0; k < frames.size(); ++k) {
    std::ostringstream name;
    name << "frame_" << std::setw(4) << std::setfill('0') << k << ".svg";
    const auto path = std::filesystem::path(out_dir) / name.str();
    detail::write_text(path, detail::svg_open(cv) + contours + detail::frame_body(frames[k], cv) + "</svg>\n");
    written.push_back(path.string());
  }
  if (animate) {
    const double total = seconds_per_frame * static_cast<double>(frames.size());
    std::ostringstream s;
    s << detail::svg_open(cv) << contours;
    for (std::size_t k = 0; k < frames.size(); ++k) {
      const double start = seconds_per_frame * static_cast<double>(k) / total;
      const double stop = seconds_per_frame * static_cast<double>(k + 1) / total;
      s << "<g visibility=\"hidden\"><animate attributeName=\"visibility\" values=\"hidden;visible;hidden\" "
        << "keyTimes=\"0;" << std::min(start, 1.0) << ';' << std::min(stop, 1.0) << "\" calcMode=\"discrete\" dur=\""
        << total << "s\" repeatCount=\"indefinite\"/>" << detail::frame_body(frames[k], cv) << "</g>";
    }
    s << "</svg>\n";
    const auto path = std::filesystem::path(out_dir) / "animation.svg";
    detail::write_text(path, s.str());
    written.push_back(path.string());
  }
  return written;
}

}  // namespace cmaes::bench
