#include "cdnarms/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cdnarms/parallel.hpp"
#include "cdnarms/random.hpp"
#include "cdnarms/simulate.hpp"

namespace cdnarms {

namespace {

ErrorEntry relativeError(std::string name, double truth, double estimate) {
  if (truth == 0.0) return {std::move(name), std::abs(estimate), true};
  return {std::move(name), std::abs(estimate - truth) / std::abs(truth), false};
}

void requireComparable(const SwitchingModel& truth, const SwitchingModel& fitted) {
  if (truth.layerCount() != fitted.layerCount()) {
    throw InvalidArgument("errors: true and fitted models have different layer counts");
  }
  for (std::size_t l = 0; l < truth.layerCount(); ++l) {
    const auto& a = *truth.layers[l].dynamics;
    const auto& b = *fitted.layers[l].dynamics;
    if (a.kind() != b.kind() || a.parameterNames() != b.parameterNames()) {
      throw InvalidArgument("errors: layer dynamics differ between true and fitted models");
    }
  }
}

double layerCost(const LayerSpec& truth, const LayerSpec& fitted) {
  double cost = relativeError("", truth.sigma, fitted.sigma).value;
  for (std::size_t k = 0; k < truth.params.size(); ++k) {
    cost += relativeError("", truth.params[k], fitted.params[k]).value;
  }
  return cost;
}

}  // namespace

std::vector<std::size_t> alignLayers(const SwitchingModel& truth, const SwitchingModel& fitted) {
  requireComparable(truth, fitted);
  std::vector<std::size_t> order(truth.layerCount());
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::size_t> best = order;
  double bestCost = std::numeric_limits<double>::infinity();
  do {
    // Layers of mixed kinds can only be paired with their own kind.
    bool valid = true;
    double cost = 0.0;
    for (std::size_t k = 0; k < order.size() && valid; ++k) {
      const auto& t = truth.layers[k];
      const auto& f = fitted.layers[order[k]];
      if (t.dynamics->kind() != f.dynamics->kind() || t.params.size() != f.params.size()) {
        valid = false;
      } else {
        cost += layerCost(t, f);
      }
    }
    if (valid && cost < bestCost) {
      bestCost = cost;
      best = order;
    }
  } while (std::next_permutation(order.begin(), order.end()));
  return best;
}

double NormalizedErrors::get(std::string_view name) const {
  for (const auto& e : entries) {
    if (e.name == name) return e.value;
  }
  throw InvalidArgument("no error entry named " + std::string(name));
}

NormalizedErrors normalizedErrors(const SwitchingModel& truth, const SwitchingModel& fitted) {
  NormalizedErrors out;
  out.alignment = alignLayers(truth, fitted);
  const SwitchingModel aligned = fitted.permuted(out.alignment);

  const double norm = truth.chain.transition.norm();
  out.entries.push_back(
      {"M", (aligned.chain.transition - truth.chain.transition).norm() / norm, false});
  for (std::size_t l = 0; l < truth.layerCount(); ++l) {
    const auto& t = truth.layers[l];
    const auto& f = aligned.layers[l];
    const auto& names = t.dynamics->parameterNames();
    for (std::size_t k = 0; k < names.size(); ++k) {
      out.entries.push_back(relativeError(qualifiedName(names[k], l), t.params[k], f.params[k]));
    }
    out.entries.push_back(relativeError(qualifiedName("sigma", l), t.sigma, f.sigma));
    if (t.dynamics->usesDelay()) {
      out.entries.push_back(relativeError(qualifiedName("D", l), t.delay, f.delay));
    }
  }
  return out;
}

std::size_t detectionFrequency(const std::vector<double>& trueDelays,
                               const std::vector<std::vector<double>>& fittedDelays) {
  std::size_t hits = 0;
  for (const auto& run : fittedDelays) {
    if (run.size() != trueDelays.size()) {
      throw InvalidArgument("detectionFrequency: delay vectors differ in length");
    }
    bool exact = true;
    for (std::size_t l = 0; l < run.size(); ++l) exact = exact && run[l] == trueDelays[l];
    hits += exact ? 1 : 0;
  }
  return hits;
}

Acf empiricalAcf(std::span<const double> x, std::size_t maxLag) {
  if (maxLag >= x.size()) throw InvalidArgument("empiricalAcf: maxLag must be below the length");
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  double c0 = 0.0;
  for (double v : x) c0 += (v - mean) * (v - mean);

  Acf out;
  out.values.assign(maxLag + 1, std::numeric_limits<double>::quiet_NaN());
  out.values[0] = 1.0;
  if (c0 == 0.0) {
    out.degenerate = true;
    return out;
  }
  for (std::size_t k = 1; k <= maxLag; ++k) {
    double ck = 0.0;
    for (std::size_t t = 0; t + k < x.size(); ++t) ck += (x[t] - mean) * (x[t + k] - mean);
    out.values[k] = ck / c0;
  }
  return out;
}

Acf ensembleAcf(const std::vector<std::vector<double>>& replicates, std::size_t maxLag) {
  Acf out;
  out.values.assign(maxLag + 1, 0.0);
  std::size_t used = 0;
  for (const auto& r : replicates) {
    const auto acf = empiricalAcf(r, maxLag);
    if (acf.degenerate) continue;
    for (std::size_t k = 0; k <= maxLag; ++k) out.values[k] += acf.values[k];
    ++used;
  }
  if (used == 0) {
    out.degenerate = true;
    std::fill(out.values.begin() + 1, out.values.end(), std::numeric_limits<double>::quiet_NaN());
    out.values[0] = 1.0;
    return out;
  }
  for (double& v : out.values) v /= static_cast<double>(used);
  return out;
}

double quantileSorted(std::span<const double> sorted, double level) {
  if (sorted.empty()) throw InvalidArgument("quantile of an empty sample");
  if (!(level >= 0.0 && level <= 1.0)) throw InvalidArgument("quantile level outside [0, 1]");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * level;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::vector<double> empiricalQuantiles(std::span<const double> x,
                                       const std::vector<double>& levels) {
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> out;
  out.reserve(levels.size());
  for (double p : levels) out.push_back(quantileSorted(sorted, p));
  return out;
}

QqTable qqQuantiles(std::span<const double> data, const SampleGenerator& generate,
                    std::size_t nSims, const std::vector<double>& levels, unsigned jobs) {
  if (nSims < 1) throw InvalidArgument("qqQuantiles: nSims must be >= 1");
  QqTable out;
  out.levels = levels;
  out.data = empiricalQuantiles(data, levels);
  std::vector<std::vector<double>> perSim(nSims);
  parallelFor(nSims, jobs,
              [&](std::size_t i) { perSim[i] = empiricalQuantiles(generate(i), levels); });
  out.model.assign(levels.size(), 0.0);
  for (const auto& q : perSim) {
    for (std::size_t k = 0; k < levels.size(); ++k) out.model[k] += q[k];
  }
  for (double& v : out.model) v /= static_cast<double>(nSims);
  return out;
}

std::vector<std::vector<double>> simulatePaths(const SwitchingModel& model, Index length,
                                               std::size_t count, std::uint64_t seed,
                                               unsigned jobs) {
  std::vector<std::vector<double>> out(count);
  parallelFor(count, jobs, [&](std::size_t i) {
    out[i] = simulate(model, length, deriveSeed(seed, i)).series.sampleValues();
  });
  return out;
}

QqTable qqQuantiles(const TimeSeries& data, const SwitchingModel& model, std::size_t nSims,
                    const std::vector<double>& levels, std::uint64_t seed, unsigned jobs) {
  const auto values = data.sampleValues();
  const Index length = data.sampleCount();
  return qqQuantiles(
      values,
      [&](std::size_t i) {
        return simulate(model, length, deriveSeed(seed, i)).series.sampleValues();
      },
      nSims, levels, jobs);
}

Acf modelAcf(const SwitchingModel& model, Index length, std::size_t nSims, std::size_t maxLag,
             std::uint64_t seed, unsigned jobs) {
  return ensembleAcf(simulatePaths(model, length, nSims, seed, jobs), maxLag);
}

}  // namespace cdnarms
