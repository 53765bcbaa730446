#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "cdnarms/evaluate.hpp"
#include "cdnarms/saem.hpp"

namespace cdnarms {

/// Replicated estimation study: each replicate simulates one series of the
/// largest requested length from `truth`, then fits every prefix of the
/// requested lengths.
struct ExperimentConfig {
  SwitchingModel truth;
  /// 1 simulates on the model grid; m > 1 integrates on h/m (delays D*m must
  /// be integers) and keeps every m-th sample.
  int refinement = 1;
  std::vector<Index> lengths{250, 1000};
  std::size_t replicates = 5;
  std::uint64_t seed = 1;
  /// Fit settings; restart seeds are derived from fit.seed, the replicate
  /// and the length.
  FitConfig fit;
  /// Pre-sample history; 0 uses ceil(fit.delayBounds.upper) or the model's
  /// own requirement if larger.
  Index historyLength = 0;
  unsigned jobs = 1;
};

struct ReplicateFit {
  std::size_t replicate = 0;
  Index length = 0;
  double logLik = 0.0;
  bool converged = false;
  std::size_t iterations = 0;
  SwitchingModel model;  // aligned to the true layer order
  NormalizedErrors errors;
};

struct ExperimentResult {
  std::vector<ReplicateFit> fits;  // replicate-major, then length

  /// Error population of one parameter ("M", "a[1]", ...) at one length.
  std::vector<double> errors(std::string_view name, Index length) const;
  /// Errors of every layer's copy of a base parameter ("a" pools a[1], a[2]).
  std::vector<double> pooledErrors(std::string_view base, Index length) const;
  /// Runs at `length` whose delays all equal the true delays.
  std::size_t detections(const SwitchingModel& truth, Index length) const;
};

using ExperimentProgress = std::function<void(const ReplicateFit&)>;

ExperimentResult runExperiment(const ExperimentConfig& config,
                               const ExperimentProgress& progress = {});

/// Median and interquartile range (type-7 quantiles).
double median(std::vector<double> values);
double interquartileRange(std::vector<double> values);

}  // namespace cdnarms
