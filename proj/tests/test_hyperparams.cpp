#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "cmaes/hyperparams.hpp"
#include "cmaes/rng.hpp"
#include "reference_stepper.hpp"

using namespace cmaes;

TEST(DefaultHyperparams, PopulationSizeForFortyDimensions) {
  EXPECT_EQ(default_hyperparams(40).lambda, 15);
}

TEST(DefaultHyperparams, PopulationSizeForTwoDimensions) {
  // 4 + floor(3 ln 2) = 4 + floor(2.079...) = 6
  const int oracle = 4 + static_cast<int>(std::floor(3.0 * std::log(2.0)));
  EXPECT_EQ(oracle, 6);
  EXPECT_EQ(default_hyperparams(2).lambda, oracle);
  EXPECT_EQ(default_hyperparams(2).mu, 3);
}

TEST(DefaultHyperparams, ExplicitPopulationWeightsSumToOne) {
  const HyperParams hp = default_hyperparams(10, 20);
  EXPECT_EQ(hp.lambda, 20);
  EXPECT_EQ(hp.mu, 10);
  EXPECT_NEAR(hp.weights.head(hp.mu).sum(), 1.0, 1e-12);
}

TEST(DefaultHyperparams, InvariantsHoldAcrossShapes) {
  for (int d : {1, 2, 3, 5, 10, 40, 100}) {
    for (int lambda : {2, 3, 7, 15, 64, 301}) {
      const HyperParams hp = default_hyperparams(d, lambda);
      SCOPED_TRACE(testing::Message() << "d=" << d << " lambda=" << lambda);
      EXPECT_NO_THROW(hp.validate());
      EXPECT_NEAR(hp.weights.head(hp.mu).sum(), 1.0, 1e-12);
      EXPECT_NEAR(hp.mu_w, 1.0 / hp.weights.head(hp.mu).squaredNorm(), 1e-12);
      for (int i = 1; i < hp.lambda; ++i) EXPECT_GE(hp.weights[i - 1], hp.weights[i]);
      EXPECT_GT(hp.weights[hp.mu - 1], 0.0);
      for (int i = hp.mu; i < hp.lambda; ++i) EXPECT_LE(hp.weights[i], 0.0);
      EXPECT_GT(hp.c_sigma, 0.0);
      EXPECT_LE(hp.c_sigma, 1.0);
      EXPECT_GT(hp.c_c, 0.0);
      EXPECT_LE(hp.c_c, 1.0);
      EXPECT_GE(hp.d_sigma, 1.0);
      EXPECT_LE(hp.c_1 + hp.c_mu * hp.weights.cwiseMax(0.0).sum(), 1.0 + 1e-15);
      EXPECT_EQ(hp.c_m, 1.0);
    }
  }
}

TEST(DefaultHyperparams, MatchesIndependentTranscription) {
  for (int d : {2, 5, 10, 40}) {
    const HyperParams hp = default_hyperparams(d);
    const reference::Constants k = reference::constants(d, hp.lambda);
    EXPECT_EQ(hp.mu, k.mu);
    EXPECT_NEAR(hp.mu_w, k.mueff, 1e-12);
    EXPECT_NEAR(hp.c_sigma, k.cs, 1e-15);
    EXPECT_NEAR(hp.d_sigma, k.ds, 1e-15);
    EXPECT_NEAR(hp.c_c, k.cc, 1e-15);
    EXPECT_NEAR(hp.c_1, k.c1, 1e-15);
    EXPECT_NEAR(hp.c_mu, k.cmu, 1e-15);
    for (int i = 0; i < hp.lambda; ++i) EXPECT_NEAR(hp.weights[i], k.w[i], 1e-15);
  }
}

TEST(DefaultHyperparams, RejectsBadArguments) {
  EXPECT_THROW(default_hyperparams(0), ValidationError);
  EXPECT_THROW(default_hyperparams(3, 1), ValidationError);
  EXPECT_THROW(default_hyperparams(3, 0), ValidationError);
}

TEST(HyperParamsValidate, RejectsBrokenWeights) {
  HyperParams hp = default_hyperparams(4);
  hp.weights[0] += 0.1;
  EXPECT_THROW(hp.validate(), ValidationError);
  hp = default_hyperparams(4);
  hp.c_sigma = 0.0;
  EXPECT_THROW(hp.validate(), ValidationError);
  hp = default_hyperparams(4);
  hp.d_sigma = 0.5;
  EXPECT_THROW(hp.validate(), ValidationError);
}

TEST(ExpectedNorm, ClosedFormAtDimensionOne) {
  // sqrt(1) * (1 - 1/4 + 1/21)
  const double oracle = 1.0 - 0.25 + 1.0 / 21.0;
  EXPECT_NEAR(expected_norm(1), oracle, 1e-15);
  EXPECT_NEAR(expected_norm(1), 0.79762, 1e-5);
}

TEST(ExpectedNorm, CloseToMonteCarloAtDimensionOne) {
  Rng rng(12345);
  const int n = 1000000;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += std::abs(rng.normal());
  const double mc = acc / n;
  EXPECT_NEAR(mc, std::sqrt(2.0 / std::numbers::pi), 3e-3);  // ~5 standard errors of the estimate
  EXPECT_NEAR(expected_norm(1), std::sqrt(2.0 / std::numbers::pi), 1e-3);
  EXPECT_NEAR(expected_norm(1), mc, 1e-3 + 3e-3);
}

TEST(ExpectedNorm, ApproachesSqrtDimension) {
  EXPECT_NEAR(expected_norm(1000000) / std::sqrt(1e6), 1.0, 1e-6);
}
