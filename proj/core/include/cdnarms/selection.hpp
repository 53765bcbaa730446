#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "cdnarms/saem.hpp"

namespace cdnarms {

/// C_T = 0.5 ln T.
double penaltyConstant(Index sampleCount);

/// |Lambda|_L: all L^2 transition entries plus, per layer, its parameters,
/// sigma and (when used) the delay. Ghil layers give L^2 + 6L.
std::size_t parameterCount(const ModelTemplate& tmpl);

struct SelectionScore {
  std::size_t layers = 0;
  double logLik = 0.0;  // best over restarts
  std::size_t paramCount = 0;
  double penalty = 0.0;  // C_T * paramCount
  double penalizedLogLik = 0.0;
  Index sampleCount = 0;  // T used in C_T
};

SelectionScore makeScore(std::size_t layers, double logLik, std::size_t paramCount,
                         Index sampleCount);

struct SelectionResult {
  std::size_t selected = 0;
  std::vector<SelectionScore> scores;
  /// Layer counts where every restart failed, with the failure message.
  std::map<std::size_t, std::string> excluded;
  std::map<std::size_t, FitResult> fits;
};

using TemplateFactory = std::function<ModelTemplate(std::size_t layers)>;

/// Fits every L in [minLayers, maxLayers] (all (L, restart) pairs share the
/// config.jobs worker pool) and picks the L with the highest penalised
/// log-likelihood, ties going to the smaller L. Throws FitFailure if every L
/// is excluded.
SelectionResult selectLayers(const TimeSeries& series, const TemplateFactory& templateFor,
                             std::size_t minLayers, std::size_t maxLayers,
                             const FitConfig& config);

}  // namespace cdnarms
