#include <gtest/gtest.h>

#include <algorithm>

#include "cmaes/bench/experiments.hpp"
#include "cmaes/bench/quick_benchmark.hpp"
#include "cmaes/cma.hpp"

using namespace cmaes;

TEST(LearningRate, TargetSnrIsFixedPoint) {
  EXPECT_EQ(next_learning_rate(1.0, 1.4, 1.4, 0.1, 0.1), 1.0);
  EXPECT_EQ(next_learning_rate(0.5, 1.4 * 0.5, 1.4, 0.1, 0.1), 0.5);
}

TEST(LearningRate, LowSnrDecreases) {
  for (double eta : {1.0, 0.3, 1e-3}) {
    EXPECT_LT(next_learning_rate(eta, 0.0, 1.4, 0.1, 0.1), eta);
    EXPECT_LT(next_learning_rate(eta, -5.0, 1.4, 0.1, 0.1), eta);
  }
}

TEST(LearningRate, HighSnrIsCappedAtOne) {
  EXPECT_EQ(next_learning_rate(1.0, 1e6, 1.4, 0.1, 0.1), 1.0);
  EXPECT_GT(next_learning_rate(0.2, 1e6, 1.4, 0.1, 0.1), 0.2);
  EXPECT_LE(next_learning_rate(0.99, 1e6, 1.4, 0.1, 0.1), 1.0);
}

TEST(LearningRate, DegenerateEstimateLeavesRateUnchanged) {
  EXPECT_FALSE(estimate_snr(1.0, 1.0, 0.1).has_value());
  EXPECT_FALSE(estimate_snr(2.0, 1.0, 0.1).has_value());
  EXPECT_EQ(next_learning_rate(0.7, estimate_snr(1.0, 1.0, 0.1), 1.4, 0.1, 0.1), 0.7);
}

TEST(LearningRate, SnrEstimateFormula) {
  // (|E|^2 - beta/(2-beta) V) / (V - |E|^2)
  const double e2 = 0.5, v = 2.0, beta = 0.1;
  EXPECT_NEAR(*estimate_snr(e2, v, beta), (0.5 - 0.1 / 1.9 * 2.0) / 1.5, 1e-15);
}

namespace {

std::vector<Snapshot> run_sphere(bool lr_adapt, bool adapt, int gens, std::uint64_t seed) {
  CmaOptions o;
  o.seed = seed;
  o.lr_adapt = lr_adapt;
  o.lra.adapt = adapt;
  CMA es(Vector::Constant(3, 2.0), 1.0, o);
  std::vector<Snapshot> out;
  for (int g = 0; g < gens; ++g) {
    std::vector<EvaluatedSolution> b;
    for (int i = 0; i < es.population_size(); ++i) {
      Vector x = es.ask();
      b.push_back({x, x.squaredNorm()});
    }
    es.tell(b);
    out.push_back(es.snapshot());
  }
  return out;
}

}  // namespace

TEST(LraTell, FixedRatesReproduceCoreTellBitIdentically) {
  const auto core = run_sphere(false, true, 200, 42);
  const auto fixed = run_sphere(true, false, 200, 42);
  for (std::size_t g = 0; g < core.size(); ++g) {
    ASSERT_EQ(core[g].mean, fixed[g].mean) << g;
    ASSERT_EQ(core[g].sigma, fixed[g].sigma) << g;
    ASSERT_EQ(core[g].cov, fixed[g].cov) << g;
    ASSERT_EQ(core[g].p_sigma, fixed[g].p_sigma) << g;
    ASSERT_EQ(core[g].p_c, fixed[g].p_c) << g;
    ASSERT_EQ(fixed[g].lra->eta_mean, 1.0);
    ASSERT_EQ(fixed[g].lra->eta_sigma, 1.0);
  }
}

TEST(LraTell, RatesStayInUnitIntervalUnderNoise) {
  for (int d : {1, 4, 12}) {
    CmaOptions o;
    o.seed = 100 + d;
    o.lr_adapt = true;
    CMA es(Vector::Zero(d), 1.0, o);
    Rng noise(d);
    for (int g = 0; g < 1500; ++g) {
      std::vector<EvaluatedSolution> b;
      for (int i = 0; i < es.population_size(); ++i) b.push_back({es.ask(), noise.normal()});
      es.tell(b);
      const LraState& l = *es.lra();
      ASSERT_GT(l.eta_mean, 0.0);
      ASSERT_LE(l.eta_mean, 1.0);
      ASSERT_GT(l.eta_sigma, 0.0);
      ASSERT_LE(l.eta_sigma, 1.0);
      ASSERT_TRUE(l.ema_mean.allFinite());
      ASSERT_TRUE(l.ema_sigma.allFinite());
      // Jensen: the average squared norm dominates the squared norm of the average.
      ASSERT_GE(l.ema_sq_mean, l.ema_mean.squaredNorm() - 1e-9);
      ASSERT_GE(l.ema_sq_sigma, l.ema_sigma.squaredNorm() - 1e-9);
    }
    EXPECT_LT(es.lra()->eta_mean, 1.0);
  }
}

TEST(LraTell, BothVariantsSolveTwoDimensionalSphere) {
  for (bool lra : {false, true}) {
    bench::RunConfig c;
    c.fn = "sphere";
    c.dim = 2;
    c.seed = 7;
    c.budget = 20000;
    c.sigma0 = 1.0;
    c.mean0 = Vector::Constant(2, 3.0);
    c.lr_adapt = lra;
    const auto rec = bench::run(c);
    EXPECT_LT(rec.best.value, 1e-8) << "lr_adapt=" << lra;
  }
}

TEST(LraTell, NoisySphereMeanEndsCloserToOptimum) {
  std::vector<double> norms[2];
  for (int lra = 0; lra < 2; ++lra) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      bench::RunConfig c;
      c.fn = "noisy_sphere";
      c.dim = 10;
      c.seed = seed;
      c.budget = 20000;
      c.sigma0 = 2.0;
      c.mean0 = Vector::Constant(10, 3.0);
      c.lr_adapt = lra == 1;
      const auto rec = bench::run(c);
      ASSERT_FALSE(rec.rows.empty());
      norms[lra].push_back(rec.rows.back().mean.norm());
    }
  }
  const double vanilla = bench::median(norms[0]);
  const double adapted = bench::median(norms[1]);
  EXPECT_LT(adapted, vanilla);
}

TEST(LraTell, ZeroBudgetHasZeroSuccess) {
  const std::uint64_t seeds[] = {1};
  const auto r = bench::rastrigin_success_rate(40, true, seeds, 0);
  EXPECT_EQ(r.rate, 0.0);
}

TEST(LraTell, FailedTellKeepsLearningRateState) {
  CmaOptions o;
  o.lr_adapt = true;
  CMA es(Vector::Zero(2), 1.0, o);
  std::vector<EvaluatedSolution> b;
  for (int i = 0; i < es.population_size(); ++i) b.push_back({es.ask(), double(i)});
  es.tell(b);
  const LraState before = *es.lra();
  b.clear();
  for (int i = 0; i < es.population_size(); ++i) b.push_back({es.ask(), double(i)});
  b.back().value = std::nan("");
  EXPECT_THROW(es.tell(b), ValidationError);
  EXPECT_EQ(es.lra()->eta_mean, before.eta_mean);
  EXPECT_EQ(es.lra()->ema_mean, before.ema_mean);
}
