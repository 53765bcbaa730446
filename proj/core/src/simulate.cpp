#include "cdnarms/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "cdnarms/random.hpp"

namespace cdnarms {

namespace {

std::size_t drawCategorical(Rng& rng, const Eigen::Ref<const Eigen::VectorXd>& pmf) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng);
  double acc = 0.0;
  const auto L = static_cast<std::size_t>(pmf.size());
  for (std::size_t k = 0; k + 1 < L; ++k) {
    acc += pmf(static_cast<Eigen::Index>(k));
    if (u < acc) return k;
  }
  return L - 1;
}

// Euler recursion on a grid whose regime may only change every `hold` steps.
SimulationResult runRecursion(const SwitchingModel& model, Index steps,
                              std::vector<double> history, int hold,
                              std::uint64_t seed) {
  const auto d = model.dim;
  TimeSeries series(d, std::move(history),
                    std::vector<double>(static_cast<std::size_t>(steps) * d, 0.0));
  SeriesWriter writer(series);

  Rng regimeRng = makeStream(seed, "regime");
  Rng noiseRng = makeStream(seed, "noise");
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<std::size_t> regimes(static_cast<std::size_t>(steps));
  std::vector<double> mean(d);
  std::size_t current = 0;
  for (Index i = 0; i < steps; ++i) {
    if (i == 0) {
      current = drawCategorical(regimeRng, model.chain.initial);
    } else if (i % hold == 0) {
      current = drawCategorical(regimeRng, model.chain.transition.row(static_cast<Eigen::Index>(current)).transpose());
    }
    regimes[static_cast<std::size_t>(i)] = current;
    const auto& layer = model.layers[current];
    layer.dynamics->predictMean(series, i, layer.delay, layer.params, model.step, mean);
    const double scale = std::sqrt(model.step) * layer.sigma;
    auto out = writer.at(i);
    for (std::size_t k = 0; k < d; ++k) out[k] = mean[k] + scale * normal(noiseRng);
  }
  return {std::move(series), std::move(regimes)};
}

std::vector<double> drawHistory(std::uint64_t seed, std::size_t count) {
  Rng rng = makeStream(seed, "history");
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> history(count);
  for (auto& v : history) v = normal(rng);
  return history;
}

}  // namespace

SimulationResult simulate(const SwitchingModel& model, Index length, std::uint64_t seed,
                          const SimulationOptions& options) {
  model.validate();
  if (length < 1) throw InvalidArgument("simulate: length must be >= 1");
  const Index needed = model.requiredHistory();
  std::vector<double> history;
  if (options.initialHistory) {
    history = *options.initialHistory;
    if (history.size() % model.dim != 0 ||
        static_cast<Index>(history.size() / model.dim) < needed) {
      throw InvalidArgument("simulate: initial history shorter than the model's delays");
    }
  } else {
    const Index H = std::max(needed, options.historyLength);
    history = drawHistory(seed, static_cast<std::size_t>(H) * model.dim);
  }
  return runRecursion(model, length, std::move(history), 1, seed);
}

SimulationResult simulateFineGrid(const SwitchingModel& model, int refinement,
                                  Index length, std::uint64_t seed, Index historyLength) {
  model.validate();
  if (refinement < 1) throw InvalidArgument("simulateFineGrid: refinement m must be >= 1");
  if (length < 1) throw InvalidArgument("simulateFineGrid: length must be >= 1");
  if (model.dim != 1) throw InvalidArgument("simulateFineGrid: scalar models only");
  const auto m = static_cast<Index>(refinement);

  SwitchingModel fine = model;
  fine.step = model.step / static_cast<double>(refinement);
  for (auto& layer : fine.layers) {
    if (!layer.dynamics->usesDelay()) continue;
    const double fineDelay = layer.delay * static_cast<double>(refinement);
    const double rounded = std::round(fineDelay);
    if (std::abs(fineDelay - rounded) > kIntegerIndexTolerance) {
      throw InvalidArgument("simulateFineGrid: delay * m must be an integer");
    }
    layer.delay = rounded;
  }

  const Index H = std::max(model.requiredHistory(), historyLength);
  const Index fineHistory = std::max(H * m, fine.requiredHistory());
  auto fineRun = runRecursion(fine, (length - 1) * m + 1,
                              drawHistory(seed, static_cast<std::size_t>(fineHistory)),
                              refinement, seed);

  std::vector<double> history(static_cast<std::size_t>(H));
  for (Index n = -H; n < 0; ++n) history[static_cast<std::size_t>(n + H)] = fineRun.series[n * m];
  std::vector<double> values(static_cast<std::size_t>(length));
  std::vector<std::size_t> regimes(static_cast<std::size_t>(length));
  for (Index n = 0; n < length; ++n) {
    values[static_cast<std::size_t>(n)] = fineRun.series[n * m];
    regimes[static_cast<std::size_t>(n)] = fineRun.regimes[static_cast<std::size_t>(n * m)];
  }
  return {TimeSeries(std::move(history), std::move(values)), std::move(regimes)};
}

}  // namespace cdnarms
