#include <gtest/gtest.h>

#include "cmaes/bench/experiments.hpp"
#include "cmaes/warm_start.hpp"

using namespace cmaes;

namespace {

std::vector<EvaluatedSolution> random_archive(int n, int d, std::uint64_t seed) {
  Rng r(seed);
  std::vector<EvaluatedSolution> a;
  for (int i = 0; i < n; ++i) {
    Vector x(d);
    for (int j = 0; j < d; ++j) x[j] = r.uniform(-5.0, 5.0);
    a.push_back({x, (x - Vector::Constant(d, 1.0)).squaredNorm() + 0.1 * r.uniform()});
  }
  return a;
}

double det(const Matrix& m) { return m.determinant(); }

}  // namespace

TEST(WarmStart, IdenticalPointsGiveIsotropicFloor) {
  std::vector<EvaluatedSolution> a(10, EvaluatedSolution{Vector::Constant(3, 2.5), 1.0});
  const auto ws = get_warm_start_mgd(a, {0.5, 0.1});
  EXPECT_EQ(ws.mean, Vector::Constant(3, 2.5));
  EXPECT_LE((ws.cov - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(ws.sigma, 0.1 * 1e-8, 1e-22);
}

TEST(WarmStart, SymmetricPairHasZeroMean) {
  Vector p(2);
  p << 1.5, -0.5;
  std::vector<EvaluatedSolution> a = {{p, 0.0}, {-p, 0.0}};
  const auto ws = get_warm_start_mgd(a, {1.0, 0.1});
  EXPECT_LE(ws.mean.cwiseAbs().maxCoeff(), 1e-15);
}

TEST(WarmStart, UnitDeterminant) {
  for (int d : {1, 2, 5, 10}) {
    for (double gamma : {0.05, 0.1, 0.5, 1.0}) {
      const auto a = random_archive(300, d, 10 * d);
      const auto ws = get_warm_start_mgd(a, {gamma, 0.1});
      EXPECT_NEAR(det(ws.cov), 1.0, 1e-9);
      EXPECT_GT(ws.sigma, 0.0);
      Eigen::SelfAdjointEigenSolver<Matrix> s(ws.cov);
      EXPECT_GT(s.eigenvalues().minCoeff(), 0.0);
      EXPECT_LE((ws.cov - ws.cov.transpose()).cwiseAbs().maxCoeff(), 1e-15);
    }
  }
}

TEST(WarmStart, FullSelectionGivesCentroid) {
  const auto a = random_archive(200, 3, 5);
  Vector centroid = Vector::Zero(3);
  for (const auto& s : a) centroid += s.x;
  centroid /= 200.0;
  const auto ws = get_warm_start_mgd(a, {1.0, 0.1});
  EXPECT_LE((ws.mean - centroid).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(WarmStart, MomentMatchedCovariance) {
  // Oracle: Sigma = empirical covariance + (alpha * l)^2 I, written out by hand.
  const auto a = random_archive(40, 2, 9);
  const auto ws = get_warm_start_mgd(a, {0.25, 0.2});
  std::vector<EvaluatedSolution> sorted = a;
  std::stable_sort(sorted.begin(), sorted.end(), [](auto& l, auto& r) { return l.value < r.value; });
  const int n = 10;
  double mx = 0, my = 0;
  for (int i = 0; i < n; ++i) mx += sorted[i].x[0] / n, my += sorted[i].x[1] / n;
  double sxx = 0, sxy = 0, syy = 0, lox = 1e9, hix = -1e9, loy = 1e9, hiy = -1e9;
  for (int i = 0; i < n; ++i) {
    const double dx = sorted[i].x[0] - mx, dy = sorted[i].x[1] - my;
    sxx += dx * dx / n, sxy += dx * dy / n, syy += dy * dy / n;
    lox = std::min(lox, sorted[i].x[0]), hix = std::max(hix, sorted[i].x[0]);
    loy = std::min(loy, sorted[i].x[1]), hiy = std::max(hiy, sorted[i].x[1]);
  }
  const double l = std::hypot(hix - lox, hiy - loy);
  const double k = 0.2 * l;
  Matrix s(2, 2);
  s << sxx + k * k, sxy, sxy, syy + k * k;
  const Matrix got = ws.sigma * ws.sigma * ws.cov;
  EXPECT_LE((got - s).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(ws.mean[0], mx, 1e-14);
  EXPECT_NEAR(ws.mean[1], my, 1e-14);
}

TEST(WarmStart, RankingOnly) {
  auto a = random_archive(100, 4, 3);
  const auto base = get_warm_start_mgd(a, {0.2, 0.1});
  for (auto& s : a) s.value = std::exp(3.0 * s.value) - 7.0;
  const auto moved = get_warm_start_mgd(a, {0.2, 0.1});
  EXPECT_EQ(base.mean, moved.mean);
  EXPECT_EQ(base.sigma, moved.sigma);
  EXPECT_EQ(base.cov, moved.cov);
}

TEST(WarmStart, MeanInsideSelectedHull) {
  const auto a = random_archive(100, 3, 21);
  const auto ws = get_warm_start_mgd(a, {0.1, 0.1});
  std::vector<EvaluatedSolution> sorted = a;
  std::stable_sort(sorted.begin(), sorted.end(), [](auto& l, auto& r) { return l.value < r.value; });
  for (int j = 0; j < 3; ++j) {
    double lo = 1e9, hi = -1e9;
    for (int i = 0; i < 10; ++i) lo = std::min(lo, sorted[i].x[j]), hi = std::max(hi, sorted[i].x[j]);
    EXPECT_GE(ws.mean[j], lo);
    EXPECT_LE(ws.mean[j], hi);
  }
}

TEST(WarmStart, Validation) {
  const auto a = random_archive(10, 2, 1);
  EXPECT_THROW(get_warm_start_mgd(a, {0.1, 0.1}), ValidationError);  // ceil(1) = 1 point
  EXPECT_THROW(get_warm_start_mgd(a, {0.5, 0.0}), ValidationError);
  EXPECT_THROW(get_warm_start_mgd(a, {0.0, 0.1}), ValidationError);
  EXPECT_THROW(get_warm_start_mgd(std::vector<EvaluatedSolution>{}, {}), ValidationError);
  auto mixed = a;
  mixed[3].x = Vector::Zero(3);
  EXPECT_THROW(get_warm_start_mgd(mixed, {0.5, 0.1}), ValidationError);
}

TEST(WarmStart, DistantSourceStillConverges) {
  const std::uint64_t seeds[] = {1, 2, 3};
  const auto r = bench::warm_start_speedup_check(Vector::Constant(4, -4.0), Vector::Constant(4, 2.0), seeds);
  for (auto e : r.warm) EXPECT_LE(e, 100000);
}

TEST(WarmStart, CoincidentOptimaSpeedUp) {
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = 0; s < 10; ++s) seeds.push_back(s);
  const auto r = bench::warm_start_speedup_check(Vector::Constant(4, 2.0), Vector::Constant(4, 2.0), seeds);
  EXPECT_GE(r.warm_wins, 8);
}
