#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "cdnarms/model.hpp"
#include "cdnarms/series.hpp"

namespace cdnarms {

/// Fitted-to-true layer matching: order[k] is the fitted layer paired with
/// true layer k. Minimises the summed relative errors of the layer parameters
/// and sigma over all permutations.
std::vector<std::size_t> alignLayers(const SwitchingModel& truth, const SwitchingModel& fitted);

struct ErrorEntry {
  std::string name;  // "M", "a[1]", "sigma[2]", "D[1]", ...
  double value = 0.0;
  bool absolute = false;  // true value was 0; |estimate - truth| reported
};

struct NormalizedErrors {
  std::vector<std::size_t> alignment;
  std::vector<ErrorEntry> entries;

  /// Throws InvalidArgument for an unknown name.
  double get(std::string_view name) const;
};

/// Relative Frobenius error of M and relative errors of every layer
/// parameter, sigma and used delay, after aligning the fitted layers.
NormalizedErrors normalizedErrors(const SwitchingModel& truth, const SwitchingModel& fitted);

/// Number of runs whose delays all equal the true (integer) delays.
std::size_t detectionFrequency(const std::vector<double>& trueDelays,
                               const std::vector<std::vector<double>>& fittedDelays);

struct Acf {
  std::vector<double> values;  // lags 0..maxLag
  bool degenerate = false;     // constant series: lags >= 1 are NaN
};

/// Sample autocorrelation r_k = sum (x_t - m)(x_{t+k} - m) / sum (x_t - m)^2.
Acf empiricalAcf(std::span<const double> x, std::size_t maxLag);

/// Lag-wise average of per-replicate ACFs. Degenerate replicates are skipped.
Acf ensembleAcf(const std::vector<std::vector<double>>& replicates, std::size_t maxLag);

/// Type-7 quantile (linear interpolation between order statistics) of
/// sorted data.
double quantileSorted(std::span<const double> sorted, double level);
std::vector<double> empiricalQuantiles(std::span<const double> x, const std::vector<double>& levels);

struct QqTable {
  std::vector<double> levels;
  std::vector<double> data;
  std::vector<double> model;  // average of per-simulation quantiles
};

using SampleGenerator = std::function<std::vector<double>(std::size_t simulation)>;

QqTable qqQuantiles(std::span<const double> data, const SampleGenerator& generate,
                    std::size_t nSims, const std::vector<double>& levels, unsigned jobs = 1);

/// Simulations of `model` with the data's length, seeded per simulation from
/// `seed`.
QqTable qqQuantiles(const TimeSeries& data, const SwitchingModel& model, std::size_t nSims,
                    const std::vector<double>& levels, std::uint64_t seed, unsigned jobs = 1);

/// Average ACF of nSims simulations of `model` with `length` samples.
Acf modelAcf(const SwitchingModel& model, Index length, std::size_t nSims, std::size_t maxLag,
             std::uint64_t seed, unsigned jobs = 1);

/// Simulated sample paths of `model`, simulation i seeded deriveSeed(seed, i).
std::vector<std::vector<double>> simulatePaths(const SwitchingModel& model, Index length,
                                               std::size_t count, std::uint64_t seed,
                                               unsigned jobs = 1);

}  // namespace cdnarms
