#include "cdnarms/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "cdnarms/parallel.hpp"
#include "cdnarms/random.hpp"
#include "cdnarms/simulate.hpp"

namespace cdnarms {

std::vector<double> ExperimentResult::errors(std::string_view name, Index length) const {
  std::vector<double> out;
  for (const auto& f : fits) {
    if (f.length == length) out.push_back(f.errors.get(name));
  }
  return out;
}

std::vector<double> ExperimentResult::pooledErrors(std::string_view base, Index length) const {
  std::vector<double> out;
  for (const auto& f : fits) {
    if (f.length != length) continue;
    for (const auto& e : f.errors.entries) {
      if (e.name == base || (e.name != "M" && parseQualifiedName(e.name).base == base)) {
        out.push_back(e.value);
      }
    }
  }
  return out;
}

std::size_t ExperimentResult::detections(const SwitchingModel& truth, Index length) const {
  std::vector<double> trueDelays;
  for (const auto& l : truth.layers) trueDelays.push_back(l.delay);
  std::vector<std::vector<double>> fitted;
  for (const auto& f : fits) {
    if (f.length != length) continue;
    std::vector<double> delays;
    for (const auto& l : f.model.layers) delays.push_back(l.delay);
    fitted.push_back(std::move(delays));
  }
  return detectionFrequency(trueDelays, fitted);
}

ExperimentResult runExperiment(const ExperimentConfig& config, const ExperimentProgress& progress) {
  config.truth.validate();
  config.fit.validate();
  if (config.lengths.empty() || config.replicates == 0) {
    throw InvalidArgument("experiment: need at least one length and one replicate");
  }
  if (config.refinement < 1) throw InvalidArgument("experiment: refinement must be >= 1");
  const Index maxLength = *std::max_element(config.lengths.begin(), config.lengths.end());
  if (*std::min_element(config.lengths.begin(), config.lengths.end()) < 1) {
    throw InvalidArgument("experiment: lengths must be positive");
  }
  const Index history = std::max<Index>(
      {config.historyLength, config.truth.requiredHistory(),
       static_cast<Index>(std::ceil(config.fit.delayBounds.upper - kIntegerIndexTolerance))});

  ModelTemplate tmpl;
  tmpl.step = config.truth.step;
  for (const auto& l : config.truth.layers) tmpl.dynamics.push_back(l.dynamics);

  const std::size_t L = config.lengths.size();
  std::vector<SimulationResult> data(config.replicates);
  parallelFor(config.replicates, config.jobs, [&](std::size_t r) {
    const auto seed = deriveSeed(config.seed, hashTag("replicate"), r);
    if (config.refinement == 1) {
      SimulationOptions options;
      options.historyLength = history;
      data[r] = simulate(config.truth, maxLength, seed, options);
    } else {
      data[r] = simulateFineGrid(config.truth, config.refinement, maxLength, seed, history);
    }
  });

  ExperimentResult result;
  result.fits.resize(config.replicates * L);
  std::mutex progressMutex;
  parallelFor(result.fits.size(), config.jobs, [&](std::size_t task) {
    const std::size_t r = task / L;
    const Index length = config.lengths[task % L];
    const TimeSeries prefix = window(data[r].series, 0, length - 1);
    FitConfig fitConfig = config.fit;
    fitConfig.seed = deriveSeed(config.fit.seed, r, static_cast<std::uint64_t>(length));
    fitConfig.jobs = 1;
    const FitResult fitted = fit(prefix, tmpl, fitConfig);

    ReplicateFit& rec = result.fits[task];
    rec.replicate = r;
    rec.length = length;
    rec.logLik = fitted.logLik();
    rec.converged = fitted.converged;
    rec.iterations = fitted.logLikTrace.size() - 1;
    rec.errors = normalizedErrors(config.truth, fitted.model);
    rec.model = fitted.model.permuted(rec.errors.alignment);
    if (progress) {
      std::lock_guard lock(progressMutex);
      progress(rec);
    }
  });
  return result;
}

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return quantileSorted(values, 0.5);
}

double interquartileRange(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return quantileSorted(values, 0.75) - quantileSorted(values, 0.25);
}

}  // namespace cdnarms
