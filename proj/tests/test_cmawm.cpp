#include <gtest/gtest.h>

#include <cmath>

#include "cmaes/cmawm.hpp"

using namespace cmaes;

namespace {

DiscretizationSpec binary_tail(int d_co, int d_bi) {
  const int d = d_co + d_bi;
  BoxBounds b = BoxBounds::unbounded(d);
  Vector steps = Vector::Zero(d);
  for (int i = d_co; i < d; ++i) {
    b.lower[i] = 0.0;
    b.upper[i] = 1.0;
    steps[i] = 1.0;
  }
  return DiscretizationSpec(b, steps);
}

double tail(double dist, double sd) { return 0.5 * std::erfc(dist / (sd * std::sqrt(2.0))); }

}  // namespace

TEST(Encode, BinaryThresholdAtHalf) {
  const auto spec = binary_tail(0, 1);
  EXPECT_EQ(encode(Vector::Constant(1, 0.3), spec)[0], 0.0);
  EXPECT_EQ(encode(Vector::Constant(1, 0.7), spec)[0], 1.0);
  EXPECT_EQ(encode(Vector::Constant(1, 0.5), spec)[0], 0.0);  // tie goes down
  EXPECT_EQ(encode(Vector::Constant(1, -3.0), spec)[0], 0.0);
  EXPECT_EQ(encode(Vector::Constant(1, 9.0), spec)[0], 1.0);
}

TEST(Encode, ContinuousIsIdentity) {
  const auto spec = DiscretizationSpec::continuous(1);
  EXPECT_EQ(encode(Vector::Constant(1, 1.234), spec)[0], 1.234);
}

TEST(Encode, IntegerLadderNearestValue) {
  const DiscretizationSpec spec(BoxBounds::uniform(1, -1.0, 2.0), Vector::Constant(1, 1.0));
  EXPECT_EQ(spec.ladder(0), (std::vector<double>{-1.0, 0.0, 1.0, 2.0}));
  EXPECT_EQ(spec.thresholds(0), (std::vector<double>{-0.5, 0.5, 1.5}));
  EXPECT_EQ(encode(Vector::Constant(1, 0.49), spec)[0], 0.0);
  EXPECT_EQ(encode(Vector::Constant(1, 1.51), spec)[0], 2.0);
}

TEST(Encode, FractionalStepsClipToBounds) {
  const DiscretizationSpec spec(BoxBounds::uniform(1, 0.0, 1.0), Vector::Constant(1, 0.4));
  EXPECT_EQ(spec.ladder(0).size(), 3u);
  EXPECT_NEAR(spec.ladder(0)[2], 0.8, 1e-15);
}

TEST(DiscretizationSpec, Validation) {
  EXPECT_THROW(DiscretizationSpec(BoxBounds::unbounded(1), Vector::Constant(1, 1.0)), ValidationError);
  EXPECT_THROW(DiscretizationSpec(BoxBounds::uniform(1, 0.0, 0.5), Vector::Constant(1, 1.0)), ValidationError);
  EXPECT_THROW(DiscretizationSpec(BoxBounds::uniform(1, 0.0, 1.0), Vector::Constant(1, -1.0)), ValidationError);
  EXPECT_THROW(DiscretizationSpec(BoxBounds::uniform(1, 0.0, 1e9), Vector::Constant(1, 1.0)), ValidationError);
}

TEST(AskWm, ContinuousSpecEvaluatesRawPoint) {
  CMAwM wm(Vector::Zero(3), 1.0, BoxBounds::unbounded(3), Vector::Zero(3));
  for (int i = 0; i < 20; ++i) {
    auto [e, t] = wm.ask();
    EXPECT_EQ(e, t);
  }
}

TEST(AskWm, EncodedPointIsConsistent) {
  CmaOptions o;
  o.seed = 4;
  CMAwM wm(Vector::Constant(4, 3.0), 1.0, binary_tail(2, 2).bounds(), binary_tail(2, 2).steps(), o);
  for (int i = 0; i < 50; ++i) {
    auto [e, t] = wm.ask();
    EXPECT_EQ(encode(t, wm.spec()), e);
    EXPECT_TRUE(e[2] == 0.0 || e[2] == 1.0);
    EXPECT_TRUE(e[3] == 0.0 || e[3] == 1.0);
  }
}

TEST(AskWm, FixedSeedIsDeterministic) {
  CmaOptions o;
  o.seed = 11;
  const auto spec = binary_tail(1, 2);
  CMAwM a(Vector::Constant(3, 0.2), 1.0, spec.bounds(), spec.steps(), o);
  CMAwM b(Vector::Constant(3, 0.2), 1.0, spec.bounds(), spec.steps(), o);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(a.ask(), b.ask());
}

TEST(Margin, MeanOnThresholdNeedsNoCorrection) {
  const auto spec = binary_tail(0, 1);
  EXPECT_EQ(crossing_probability(spec, 0, 0.5, 0.1), 0.5);
  DistributionState st;
  st.mean = Vector::Constant(1, 0.5);
  st.sigma = 0.1;
  st.cov = Matrix::Identity(1, 1);
  EXPECT_EQ(apply_margin(st, spec, {0.05}), 0);
  EXPECT_EQ(st.mean[0], 0.5);
}

TEST(Margin, TinyVarianceIsCorrectedToAlpha) {
  const auto spec = binary_tail(0, 1);
  const double alpha = 0.05;
  DistributionState st;
  st.mean = Vector::Constant(1, 0.999999);
  st.sigma = 1e-9;
  st.cov = Matrix::Identity(1, 1);
  const double before = tail(0.999999 - 0.5, 1e-9);
  EXPECT_LT(before, alpha);
  EXPECT_EQ(apply_margin(st, spec, {alpha}), 1);
  const double sd = st.sigma * std::sqrt(st.cov(0, 0));
  const double after = tail(std::abs(st.mean[0] - 0.5), sd);
  EXPECT_NEAR(after, alpha, 1e-6);
  EXPECT_GE(after, alpha - 1e-9);
  EXPECT_GT(st.mean[0], 0.5);  // still encodes to 1
}

TEST(Margin, PinnedBranchInflatesVariance) {
  const auto spec = binary_tail(0, 1);
  const double alpha = 0.01;
  DistributionState st;
  st.mean = Vector::Constant(1, 0.2);
  st.sigma = 1e-30;
  st.cov = Matrix::Identity(1, 1);
  EXPECT_EQ(apply_margin(st, spec, {alpha}), 1);
  EXPECT_LT(st.mean[0], 0.5);
  const double sd = st.sigma * std::sqrt(st.cov(0, 0));
  EXPECT_GT(st.cov(0, 0), 1.0);
  EXPECT_GE(tail(0.5 - st.mean[0], sd), alpha - 1e-9);
  EXPECT_NEAR(tail(0.5 - st.mean[0], sd), alpha, 1e-6);
}

TEST(Margin, ContinuousCoordinatesUntouched) {
  const auto spec = binary_tail(2, 2);
  DistributionState st;
  st.mean = Vector::Constant(4, 0.9);
  st.sigma = 1e-3;
  st.cov = Matrix::Identity(4, 4);
  st.cov(0, 0) = 2.0;
  apply_margin(st, spec, {0.1});
  EXPECT_EQ(st.mean[0], 0.9);
  EXPECT_EQ(st.mean[1], 0.9);
  EXPECT_EQ(st.cov(0, 0), 2.0);
  EXPECT_EQ(st.cov(1, 1), 1.0);
  EXPECT_NE(st.mean[2], 0.9);
}

TEST(Margin, DefaultAlpha) {
  const auto spec = binary_tail(2, 2);
  CMAwM wm(Vector::Zero(4), 1.0, spec.bounds(), spec.steps());
  EXPECT_DOUBLE_EQ(wm.margin().alpha, 1.0 / (wm.population_size() * 4.0));
  EXPECT_THROW(CMAwM(Vector::Zero(4), 1.0, spec.bounds(), spec.steps(), {}, 0.5), ValidationError);
  EXPECT_THROW(CMAwM(Vector::Zero(4), 1.0, spec.bounds(), spec.steps(), {}, 0.0), ValidationError);
}

TEST(TellWm, ContinuousSpecMatchesVanilla) {
  CmaOptions o;
  o.seed = 6;
  CMA plain(Vector::Constant(3, 1.0), 0.5, o);
  CMAwM wm(Vector::Constant(3, 1.0), 0.5, BoxBounds::unbounded(3), Vector::Zero(3), o);
  for (int g = 0; g < 100; ++g) {
    std::vector<EvaluatedSolution> a, b;
    for (int i = 0; i < plain.population_size(); ++i) {
      Vector x = plain.ask();
      a.push_back({x, x.squaredNorm()});
      auto [e, t] = wm.ask();
      b.push_back({t, e.squaredNorm()});
    }
    plain.tell(a);
    wm.tell(b);
    ASSERT_EQ(plain.state().mean, wm.cma().state().mean);
    ASSERT_EQ(plain.state().cov, wm.cma().state().cov);
    ASSERT_EQ(plain.state().sigma, wm.cma().state().sigma);
  }
}

TEST(TellWm, MarginHoldsEveryGeneration) {
  const auto spec = binary_tail(3, 5);
  CmaOptions o;
  o.seed = 13;
  CMAwM wm(Vector::Constant(8, 0.5), 1.0, spec.bounds(), spec.steps(), o);
  const double alpha = wm.margin().alpha;
  for (int g = 0; g < 500; ++g) {
    std::vector<EvaluatedSolution> b;
    for (int i = 0; i < wm.population_size(); ++i) {
      auto [e, t] = wm.ask();
      b.push_back({t, ellipsoid_onemax(e, 3, 5)});
    }
    wm.tell(b);
    const auto& st = wm.cma().state();
    for (int j = 3; j < 8; ++j)
      ASSERT_GE(crossing_probability(spec, j, st.mean[j], st.sigma * std::sqrt(st.cov(j, j))), alpha - 1e-9);
  }
}

TEST(EllipsoidOneMax, Examples) {
  Vector opt(4);
  opt << 0, 0, 1, 1;
  EXPECT_EQ(ellipsoid_onemax(opt, 2, 2), 0.0);
  Vector x(4);
  x << 1, 1, 1, 0;
  EXPECT_EQ(ellipsoid_onemax(x, 2, 2), 1000002.0);
  EXPECT_EQ(ellipsoid_onemax(Vector::Zero(4), 2, 2), 2.0);
  EXPECT_THROW(ellipsoid_onemax(Vector::Zero(3), 2, 2), ValidationError);
}
