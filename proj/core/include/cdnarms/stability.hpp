#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cdnarms/model.hpp"

namespace cdnarms {

/// Invariant pmf of an irreducible transition matrix (pi M = pi, sum 1).
/// Throws InvalidArgument when M is not row-stochastic or is reducible.
Eigen::VectorXd stationaryDistribution(const Eigen::MatrixXd& transition);

/// True when every state reaches every other through positive entries.
bool isIrreducible(const Eigen::MatrixXd& transition);

/// M_s(i, j) = (sqrt(2) K[j])^s M(i, j).
Eigen::MatrixXd momentMatrix(const Eigen::MatrixXd& transition,
                             const std::vector<double>& lipschitz, double order);

struct SpectralRadius {
  double value = 0.0;
  double lowerBound = 0.0;  // Collatz-Wielandt bounds at the last iterate
  double upperBound = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Spectral radius of an entrywise nonnegative matrix by power iteration on
/// A + c I, bracketed by Collatz-Wielandt bounds. Falls back to a dense
/// eigensolver when the bracket does not close (reducible A).
SpectralRadius spectralRadius(const Eigen::MatrixXd& matrix, double tolerance = 1e-14,
                              std::size_t maxIter = 100000);

struct MomentCheck {
  double order = 2.0;
  Eigen::MatrixXd matrix;
  SpectralRadius radius;
  bool finite = false;  // radius < 1
};

struct StabilityReport {
  std::vector<double> lipschitz;  // NaN where a layer has no bound
  std::vector<double> clamped;    // max(1, K)
  Eigen::VectorXd stationary;
  double averageLogGrowth = 0.0;  // sum_l P_inf(l) ln(sqrt(2) Khat_l)
  double growthThreshold = 1.0;
  bool growthBelowThreshold = false;  // value < threshold
  bool growthNegative = false;        // value < 0
  std::vector<MomentCheck> moments;
  bool complete = true;
  std::vector<std::string> notes;
};

StabilityReport certify(const Eigen::MatrixXd& transition, const std::vector<double>& lipschitz,
                        const std::vector<double>& orders = {2.0},
                        double growthThreshold = 1.0);

/// Uses each layer's lipschitzBound(). A layer without one makes the report
/// incomplete: the bounds are listed but no check is run.
StabilityReport certify(const SwitchingModel& model, const std::vector<double>& orders = {2.0},
                        double growthThreshold = 1.0);

}  // namespace cdnarms
