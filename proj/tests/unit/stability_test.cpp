#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "cdnarms/error.hpp"
#include "cdnarms/stability.hpp"
#include "support/oracles.hpp"

namespace cdnarms {
namespace {

Eigen::MatrixXd twoStateChain() {
  Eigen::MatrixXd M(2, 2);
  M << 0.6, 0.4, 0.3, 0.7;
  return M;
}

// Largest root of lambda^2 - tr lambda + det.
double charPolyRadius(const Eigen::Matrix2d& A) {
  const double tr = A.trace(), det = A.determinant();
  return 0.5 * (tr + std::sqrt(tr * tr - 4.0 * det));
}

TEST(Stationary, KnownChains) {
  const auto u = stationaryDistribution(Eigen::MatrixXd::Constant(2, 2, 0.5));
  EXPECT_NEAR(u(0), 0.5, 1e-14);
  EXPECT_NEAR(u(1), 0.5, 1e-14);
  const auto p = stationaryDistribution(twoStateChain());
  EXPECT_NEAR(p(0), 3.0 / 7.0, 1e-14);
  EXPECT_NEAR(p(1), 4.0 / 7.0, 1e-14);
  EXPECT_THROW(stationaryDistribution(Eigen::MatrixXd::Identity(2, 2)), InvalidArgument);
}

TEST(Stationary, RandomChainsAreInvariant) {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 50; ++t) {
    const auto M = testing::randomStochastic(2 + t % 5, rng);
    const Eigen::VectorXd p = stationaryDistribution(M);
    EXPECT_NEAR(p.sum(), 1.0, 1e-12);
    EXPECT_GE(p.minCoeff(), 0.0);
    EXPECT_LT((p.transpose() * M - p.transpose()).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Stationary, PeriodicChainHasAUniqueLaw) {
  Eigen::MatrixXd M(2, 2);
  M << 0.0, 1.0, 1.0, 0.0;
  EXPECT_TRUE(isIrreducible(M));
  const auto p = stationaryDistribution(M);
  EXPECT_NEAR(p(0), 0.5, 1e-14);
  Eigen::MatrixXd R(3, 3);
  R << 0.5, 0.5, 0.0, 0.5, 0.5, 0.0, 0.2, 0.2, 0.6;
  EXPECT_FALSE(isIrreducible(R));
}

TEST(Certify, SingleLayerExamples) {
  const Eigen::MatrixXd one = Eigen::MatrixXd::Ones(1, 1);
  const auto ok = certify(one, {0.5});
  EXPECT_NEAR(ok.moments[0].matrix(0, 0), 0.5, 1e-15);
  EXPECT_NEAR(ok.moments[0].radius.value, 0.5, 1e-14);
  EXPECT_TRUE(ok.moments[0].finite);
  const auto bad = certify(one, {1.0});
  EXPECT_NEAR(bad.moments[0].radius.value, 2.0, 1e-14);
  EXPECT_FALSE(bad.moments[0].finite);
}

TEST(Certify, TwoLayerRadiusMatchesDenseAndCharacteristicPolynomial) {
  const auto report = certify(twoStateChain(), {0.3, 0.9});
  const Eigen::MatrixXd M2 = report.moments[0].matrix;
  EXPECT_NEAR(M2(0, 0), 2.0 * 0.09 * 0.6, 1e-15);
  EXPECT_NEAR(M2(0, 1), 2.0 * 0.81 * 0.4, 1e-15);
  const double dense = M2.eigenvalues().cwiseAbs().maxCoeff();
  EXPECT_NEAR(report.moments[0].radius.value, dense, 1e-9);
  EXPECT_NEAR(report.moments[0].radius.value, charPolyRadius(M2), 1e-9);
  EXPECT_LE(report.moments[0].radius.lowerBound, report.moments[0].radius.value + 1e-15);
  EXPECT_GE(report.moments[0].radius.upperBound, report.moments[0].radius.value - 1e-15);
}

TEST(Certify, RandomTwoByTwoAgainstCharacteristicPolynomial) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.1, 3.0);
  for (int t = 0; t < 100; ++t) {
    const auto M = testing::randomStochastic(2, rng);
    const std::vector<double> K{u(rng), u(rng)};
    for (double s : {1.0, 2.0, 3.0}) {
      const Eigen::Matrix2d Ms = momentMatrix(M, K, s);
      const auto r = spectralRadius(Ms);
      EXPECT_NEAR(r.value, charPolyRadius(Ms), 1e-9 * charPolyRadius(Ms));
    }
  }
}

TEST(Certify, ScalingLipschitzScalesRadius) {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 20; ++t) {
    const long L = 2 + t % 4;
    const auto M = testing::randomStochastic(L, rng);
    std::vector<double> K(static_cast<std::size_t>(L));
    std::uniform_real_distribution<double> u(0.2, 1.5);
    for (auto& k : K) k = u(rng);
    const double base = spectralRadius(momentMatrix(M, K, 2.0)).value;
    for (double lambda : {2.0, 10.0}) {
      auto scaled = K;
      for (auto& k : scaled) k *= lambda;
      const double r = spectralRadius(momentMatrix(M, scaled, 2.0)).value;
      EXPECT_NEAR(r, lambda * lambda * base, 1e-9 * lambda * lambda * base);
    }
  }
}

TEST(Certify, ReducibleMatrixFallsBack) {
  Eigen::MatrixXd A(3, 3);
  A << 0.2, 0.0, 0.0, 0.5, 0.9, 0.0, 0.1, 0.1, 0.4;
  EXPECT_NEAR(spectralRadius(A).value, 0.9, 1e-12);
  EXPECT_NEAR(spectralRadius(Eigen::MatrixXd::Zero(2, 2)).value, 0.0, 1e-15);
}

TEST(Certify, AverageLogGrowthAndThresholds) {
  const auto r = certify(twoStateChain(), {0.3, 0.9}, {2.0}, 1.0);
  const double expected = (3.0 / 7.0) * std::log(std::sqrt(2.0)) + (4.0 / 7.0) * std::log(std::sqrt(2.0));
  EXPECT_NEAR(r.averageLogGrowth, expected, 1e-14);
  EXPECT_EQ(r.clamped, (std::vector<double>{1.0, 1.0}));
  EXPECT_TRUE(r.growthBelowThreshold);
  EXPECT_FALSE(r.growthNegative);
  EXPECT_TRUE(r.complete);
}

TEST(Certify, ModelWithGhilLayersUsesTheirBounds) {
  const auto model = presets::ghilTwoLayer();
  const auto r = certify(model);
  ASSERT_EQ(r.lipschitz.size(), 2u);
  EXPECT_NEAR(r.lipschitz[0], std::sqrt(1.0 + std::pow(10.0 * 3.0 / 12.0, 2)), 1e-14);
  EXPECT_NEAR(r.lipschitz[1], std::sqrt(1.0 + std::pow(1.0 / 12.0, 2)), 1e-14);
  const auto again = certify(model);
  EXPECT_EQ(r.moments[0].radius.value, again.moments[0].radius.value);
  EXPECT_EQ(r.averageLogGrowth, again.averageLogGrowth);
}

class NoBoundLayer final : public LayerDynamics {
 public:
  std::string kind() const override { return "nobound"; }
  const std::vector<std::string>& parameterNames() const override {
    static const std::vector<std::string> names{"c"};
    return names;
  }
  std::vector<bool> linearMask() const override { return {true}; }
  void predictMean(const TimeSeries& s, Index n, double, std::span<const double> p, double,
                   std::span<double> mean) const override {
    mean[0] = p[0] * std::sin(s[n - 1]);
  }
  bool usesDelay() const override { return false; }
};

TEST(Certify, MissingBoundMakesReportIncomplete) {
  SwitchingModel m = presets::ghilTwoLayer();
  m.layers[1].dynamics = std::make_shared<NoBoundLayer>();
  m.layers[1].params = {0.5};
  m.layers[1].delay = 2.0;
  const auto r = certify(m);
  EXPECT_FALSE(r.complete);
  EXPECT_TRUE(std::isnan(r.lipschitz[1]));
  EXPECT_FALSE(r.notes.empty());
}

}  // namespace
}  // namespace cdnarms
