#include "cdnarms/selection.hpp"

#include <cmath>

#include "cdnarms/parallel.hpp"

namespace cdnarms {

double penaltyConstant(Index sampleCount) {
  if (sampleCount < 1) throw InvalidArgument("penaltyConstant: need at least one sample");
  return 0.5 * std::log(static_cast<double>(sampleCount));
}

std::size_t parameterCount(const ModelTemplate& tmpl) {
  const auto L = tmpl.layerCount();
  std::size_t count = L * L;
  for (const auto& dyn : tmpl.dynamics) {
    count += dyn->parameterCount() + 1 + (dyn->usesDelay() ? 1 : 0);
  }
  return count;
}

SelectionScore makeScore(std::size_t layers, double logLik, std::size_t paramCount,
                         Index sampleCount) {
  SelectionScore s;
  s.layers = layers;
  s.logLik = logLik;
  s.paramCount = paramCount;
  s.sampleCount = sampleCount;
  s.penalty = penaltyConstant(sampleCount) * static_cast<double>(paramCount);
  s.penalizedLogLik = logLik - s.penalty;
  return s;
}

SelectionResult selectLayers(const TimeSeries& series, const TemplateFactory& templateFor,
                             std::size_t minLayers, std::size_t maxLayers,
                             const FitConfig& config) {
  if (minLayers < 1 || maxLayers < minLayers) {
    throw InvalidArgument("selectLayers: need 1 <= minLayers <= maxLayers");
  }
  config.validate();
  std::vector<ModelTemplate> templates;
  for (auto L = minLayers; L <= maxLayers; ++L) {
    templates.push_back(templateFor(L));
    if (templates.back().layerCount() != L) {
      throw InvalidArgument("selectLayers: template for L = " + std::to_string(L) +
                            " has " + std::to_string(templates.back().layerCount()) + " layers");
    }
  }

  const std::size_t R = config.restarts;
  std::vector<FitResult> runs(templates.size() * R);
  parallelFor(runs.size(), config.jobs, [&](std::size_t task) {
    runs[task] = runRestart(series, templates[task / R], config, task % R);
  });

  SelectionResult out;
  for (std::size_t k = 0; k < templates.size(); ++k) {
    const std::size_t L = minLayers + k;
    std::vector<FitResult> mine(std::make_move_iterator(runs.begin() + static_cast<Index>(k * R)),
                                std::make_move_iterator(runs.begin() + static_cast<Index>((k + 1) * R)));
    try {
      FitResult best = bestRestart(std::move(mine), config);
      out.scores.push_back(
          makeScore(L, best.logLik(), parameterCount(templates[k]), series.sampleCount()));
      out.fits.emplace(L, std::move(best));
    } catch (const FitFailure& e) {
      out.excluded.emplace(L, e.what());
    }
  }
  if (out.scores.empty()) throw FitFailure("selectLayers: every candidate layer count failed");

  const SelectionScore* best = &out.scores.front();
  for (const auto& s : out.scores) {
    if (s.penalizedLogLik > best->penalizedLogLik) best = &s;
  }
  out.selected = best->layers;
  return out;
}

}  // namespace cdnarms
