#pragma once

#include <vector>

#include <Eigen/Dense>

#include "cdnarms/model.hpp"
#include "cdnarms/series.hpp"

namespace cdnarms {

/// Smoothed regime posteriors and the exact data log-likelihood.
struct SmoothingResult {
  /// (T+1) x L, gamma(n, l) = P(l_n = l | x_{0:T}).
  Eigen::MatrixXd gamma;
  /// T matrices of size L x L; xi[n-1](i, j) = P(l_{n-1} = i, l_n = j | x_{0:T}).
  std::vector<Eigen::MatrixXd> xi;
  /// sum over n of xi[n-1].
  Eigen::MatrixXd xiSum;
  /// log p(x_{0:T} | model); -infinity when some sample has zero density
  /// under every layer.
  double logLik = 0.0;

  bool finite() const noexcept;
};

/// (T+1) x L table of conditionalLogDensity values; non-finite entries are
/// reported as -infinity.
Eigen::MatrixXd logDensityTable(const SwitchingModel& model, const TimeSeries& series);

/// Scaled forward-backward recursion, O(T L^2).
SmoothingResult forwardBackward(const SwitchingModel& model, const TimeSeries& series);

/// Same recursion on a precomputed log-density table.
SmoothingResult forwardBackward(const MarkovChainSpec& chain,
                                const Eigen::MatrixXd& logDensities);

}  // namespace cdnarms
