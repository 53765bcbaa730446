#include "cdnarms/saem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include "cdnarms/parallel.hpp"
#include "cdnarms/random.hpp"

namespace cdnarms {

namespace {

constexpr double kRidge = 1e-10;
constexpr double kMinConditioning = 1e-13;
constexpr double kNoWeight = 1e-12;

std::vector<bool> starLinearFlags(const SwitchingModel& model,
                                  const ParameterPartition& partition, std::size_t layer) {
  const auto& dyn = *model.layers[layer].dynamics;
  const auto mask = dyn.linearMask();
  std::vector<bool> flags;
  for (std::size_t k = 0; k < mask.size(); ++k) {
    if (!mask[k]) continue;
    const auto name = qualifiedName(dyn.parameterNames()[k], layer);
    flags.push_back(std::find(partition.star.begin(), partition.star.end(), name) !=
                    partition.star.end());
  }
  return flags;
}

std::span<const double> column(const Eigen::MatrixXd& m, Eigen::Index col) {
  return {m.data() + col * m.rows(), static_cast<std::size_t>(m.rows())};
}

}  // namespace

// --- configuration -------------------------------------------------------------

ArsConfig ArsOptions::forInterval(const Interval& interval) const {
  ArsConfig config;
  config.maxRadius = radiusFraction * interval.width();
  config.minRadius = minRadiusRatio * config.maxRadius;
  config.contraction = contraction;
  config.maxIter = maxIter;
  config.stallLength = stallLength;
  return config;
}

void FitConfig::validate() const {
  if (restarts < 1) throw InvalidArgument("FitConfig: restarts must be >= 1");
  if (!(delayBounds.lower > 1.0) || !(delayBounds.upper >= delayBounds.lower)) {
    throw InvalidArgument("FitConfig: delay bounds need 1 < D_min <= D_max");
  }
  if (integerDelays && std::floor(delayBounds.upper) < std::ceil(delayBounds.lower)) {
    throw InvalidArgument("FitConfig: no integer delay inside the delay bounds");
  }
  if (!(tolerance >= 0.0)) throw InvalidArgument("FitConfig: tolerance must be >= 0");
  if (!(sigmaFloor > 0.0)) throw InvalidArgument("FitConfig: sigma floor must be > 0");
  if (!(ars.contraction > 1.0) || ars.radiusFraction <= 0.0 || ars.minRadiusRatio <= 0.0 ||
      ars.minRadiusRatio >= 1.0) {
    throw InvalidArgument("FitConfig: invalid ARS options");
  }
  for (const auto& [name, box] : initialBoxes) {
    if (!(box.lower <= box.upper)) throw InvalidArgument("FitConfig: empty initial box for " + name);
  }
}

ModelTemplate ModelTemplate::uniform(std::shared_ptr<const LayerDynamics> dynamics,
                                     std::size_t layers, double step) {
  if (layers == 0) throw InvalidArgument("ModelTemplate: need at least one layer");
  return ModelTemplate{std::vector(layers, std::move(dynamics)), step};
}

// --- expectation ---------------------------------------------------------------

SmoothingResult eStep(const SwitchingModel& model, const TimeSeries& series) {
  return forwardBackward(model, series);
}

ExpectedLogLik expectedLogLik(const SwitchingModel& model, const TimeSeries& series,
                              const SmoothingResult& posteriors) {
  const Eigen::MatrixXd logDens = logDensityTable(model, series);
  const auto L = logDens.cols();
  if (posteriors.gamma.rows() != logDens.rows() || posteriors.gamma.cols() != L) {
    throw InvalidArgument("expectedLogLik: posteriors do not match the model and series");
  }
  auto weighted = [](double w, double logValue) { return w > 0.0 ? w * logValue : 0.0; };

  ExpectedLogLik out;
  out.perLayer.assign(static_cast<std::size_t>(L), 0.0);
  for (Eigen::Index l = 0; l < L; ++l) {
    double acc = 0.0;
    for (Eigen::Index n = 0; n < logDens.rows(); ++n) {
      acc += weighted(posteriors.gamma(n, l), logDens(n, l));
    }
    out.perLayer[static_cast<std::size_t>(l)] = acc;
    out.state += acc;
  }
  for (Eigen::Index i = 0; i < L; ++i) {
    for (Eigen::Index j = 0; j < L; ++j) {
      out.transition += weighted(posteriors.xiSum(i, j), std::log(model.chain.transition(i, j)));
    }
    out.initial += weighted(posteriors.gamma(0, i), std::log(model.chain.initial(i)));
  }
  return out;
}

// --- transition update ---------------------------------------------------------

TransitionUpdate mStepTransition(const Eigen::MatrixXd& xiSum, const Eigen::MatrixXd& previous) {
  if (xiSum.rows() != xiSum.cols() || previous.rows() != xiSum.rows() ||
      previous.cols() != xiSum.cols()) {
    throw InvalidArgument("mStepTransition: shape mismatch");
  }
  TransitionUpdate out{previous, {}};
  for (Eigen::Index i = 0; i < xiSum.rows(); ++i) {
    const double mass = xiSum.row(i).sum();
    if (mass > 0.0 && std::isfinite(mass)) {
      out.transition.row(i) = xiSum.row(i) / mass;
    } else {
      out.frozenRows.push_back(static_cast<std::size_t>(i));
    }
  }
  return out;
}

TransitionUpdate mStepTransition(const std::vector<Eigen::MatrixXd>& xi,
                                 const Eigen::MatrixXd& previous) {
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(previous.rows(), previous.cols());
  for (const auto& slice : xi) sum += slice;
  return mStepTransition(sum, previous);
}

// --- layer profile -------------------------------------------------------------

LayerProfile::LayerProfile(const TimeSeries& series, double step,
                           std::span<const double> weights, std::vector<bool> starLinear,
                           double sigmaFloor)
    : series_(series),
      step_(step),
      weights_(weights),
      starLinear_(std::move(starLinear)),
      sigmaFloor_(sigmaFloor) {
  if (series.dim() != 1) throw InvalidArgument("LayerProfile: scalar series only");
  if (static_cast<Index>(weights.size()) != series.sampleCount()) {
    throw InvalidArgument("LayerProfile: one weight per sample required");
  }
  for (double w : weights) totalWeight_ += w;
  sampleCount_ = static_cast<std::size_t>(series.sampleCount());
  target_.resize(sampleCount_);
  for (std::size_t k = 0; k < starLinear_.size(); ++k) {
    if (starLinear_[k]) starColumns_.push_back(k);
  }
}

void LayerProfile::fillDesign(const LayerSpec& layer) {
  const auto& dyn = *layer.dynamics;
  if (dynamics_ != &dyn) {
    linearParams_.clear();
    const auto mask = dyn.linearMask();
    for (std::size_t k = 0; k < mask.size(); ++k) {
      if (mask[k]) linearParams_.push_back(k);
    }
    if (linearParams_.size() != starLinear_.size()) {
      throw InvalidArgument("LayerProfile: layer does not match the profile");
    }
    inputs_ = dyn.designInputs();
    const std::size_t K = linearParams_.size();
    columns_.assign((K + 1) * sampleCount_, 0.0);
    columnKeys_.assign(K + 1, {});
    columnValid_.assign(K + 1, false);
    dynamics_ = &dyn;
  }
  const std::size_t K = linearParams_.size();

  if (inputs_.empty()) {
    std::vector<double> regressors(K);
    double offset = 0.0;
    for (std::size_t n = 0; n < sampleCount_; ++n) {
      dyn.linearDesign(series_, static_cast<Index>(n), layer.delay, layer.params, step_, offset,
                       regressors);
      for (std::size_t k = 0; k < K; ++k) columns_[k * sampleCount_ + n] = regressors[k];
      columns_[K * sampleCount_ + n] = offset;
    }
  } else {
    std::vector<double> key;
    for (std::size_t k = 0; k <= K; ++k) {
      key.clear();
      for (auto input : inputs_[k]) {
        key.push_back(input < layer.params.size() ? layer.params[input] : layer.delay);
      }
      if (columnValid_[k] && key == columnKeys_[k]) continue;
      dyn.designColumn(series_, layer.delay, layer.params, step_, k,
                       {columns_.data() + k * sampleCount_, sampleCount_});
      columnKeys_[k] = key;
      columnValid_[k] = true;
    }
  }

  const double* offset = column(K);
  for (std::size_t n = 0; n < sampleCount_; ++n) {
    target_[n] = series_[static_cast<Index>(n)] - offset[n];
  }
  for (std::size_t k = 0; k < K; ++k) {
    if (starLinear_[k]) continue;
    const double theta = layer.params[linearParams_[k]];
    const double* g = column(k);
    for (std::size_t n = 0; n < sampleCount_; ++n) target_[n] -= theta * g[n];
  }
}

double LayerProfile::evaluate(double rss, double sigma) const {
  const double var = step_ * sigma * sigma;
  return -0.5 * totalWeight_ * std::log(2.0 * std::numbers::pi * var) - 0.5 * rss / var;
}

double LayerProfile::weightedRss(std::span<const double> theta) const {
  double rss = 0.0;
  for (std::size_t n = 0; n < sampleCount_; ++n) {
    double r = target_[n];
    for (std::size_t s = 0; s < starColumns_.size(); ++s) r -= theta[s] * column(starColumns_[s])[n];
    rss += weights_[n] * r * r;
  }
  return rss;
}

std::vector<double> LayerProfile::starTheta(const LayerSpec& layer) const {
  std::vector<double> theta;
  for (auto k : starColumns_) theta.push_back(layer.params[linearParams_[k]]);
  return theta;
}

LayerProfile::Solution LayerProfile::solve(const LayerSpec& layer) {
  fillDesign(layer);
  const auto S = static_cast<Eigen::Index>(starColumns_.size());

  Solution out;
  out.params = layer.params;
  std::vector<double> theta = starTheta(layer);

  if (totalWeight_ > kNoWeight && S > 0) {
    Eigen::MatrixXd gram(S, S);
    Eigen::VectorXd rhs(S);
    for (Eigen::Index s = 0; s < S; ++s) {
      const double* gs = column(starColumns_[static_cast<std::size_t>(s)]);
      double acc = 0.0;
      for (std::size_t n = 0; n < sampleCount_; ++n) acc += weights_[n] * gs[n] * target_[n];
      rhs(s) = acc;
      for (Eigen::Index t = 0; t <= s; ++t) {
        const double* gt = column(starColumns_[static_cast<std::size_t>(t)]);
        double g = 0.0;
        for (std::size_t n = 0; n < sampleCount_; ++n) g += weights_[n] * gs[n] * gt[n];
        gram(s, t) = gram(t, s) = g;
      }
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
        !(ldlt.rcond() > kMinConditioning)) {
      ldlt.compute(gram + kRidge * Eigen::MatrixXd::Identity(S, S));
      out.ridge = true;
    }
    const Eigen::VectorXd solved = ldlt.solve(rhs);
    for (Eigen::Index s = 0; s < S; ++s) theta[static_cast<std::size_t>(s)] = solved(s);
  }

  const double rss = weightedRss(theta);
  for (std::size_t s = 0; s < starColumns_.size(); ++s) {
    out.params[linearParams_[starColumns_[s]]] = theta[s];
  }
  if (totalWeight_ > kNoWeight) {
    out.sigma = std::max(std::sqrt(rss / (totalWeight_ * step_)), sigmaFloor_);
  } else {
    out.sigma = layer.sigma;
  }
  out.value = evaluate(rss, out.sigma);
  return out;
}

double LayerProfile::value(const LayerSpec& layer) {
  fillDesign(layer);
  return evaluate(weightedRss(starTheta(layer)), layer.sigma);
}

Eigen::VectorXd LayerProfile::normalResidual(const LayerSpec& layer) {
  fillDesign(layer);
  const auto theta = starTheta(layer);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(starColumns_.size()));
  for (std::size_t n = 0; n < sampleCount_; ++n) {
    double r = target_[n];
    for (std::size_t s = 0; s < starColumns_.size(); ++s) r -= theta[s] * column(starColumns_[s])[n];
    for (std::size_t s = 0; s < starColumns_.size(); ++s) {
      out(static_cast<Eigen::Index>(s)) += column(starColumns_[s])[n] * weights_[n] * r;
    }
  }
  return out;
}

// --- partition -----------------------------------------------------------------

void validatePartition(const SwitchingModel& model, const ParameterPartition& partition) {
  std::set<std::string> star(partition.star.begin(), partition.star.end());
  std::set<std::string> coord(partition.coord.begin(), partition.coord.end());
  if (star.size() != partition.star.size() || coord.size() != partition.coord.size()) {
    throw InvalidArgument("partition: duplicate entries");
  }
  std::size_t expected = 0;
  auto require = [&](const std::string& name, bool allowStar, bool allowCoord) {
    ++expected;
    const bool inStar = star.count(name) > 0;
    const bool inCoord = coord.count(name) > 0;
    if (inStar && inCoord) throw InvalidArgument("partition: " + name + " is in both blocks");
    if (!inStar && !inCoord) throw InvalidArgument("partition: " + name + " is missing");
    if (inStar && !allowStar) throw InvalidArgument("partition: " + name + " cannot be solved exactly");
    if (inCoord && !allowCoord) throw InvalidArgument("partition: " + name + " must be in the star block");
  };
  for (std::size_t l = 0; l < model.layerCount(); ++l) {
    const auto& dyn = *model.layers[l].dynamics;
    const auto mask = dyn.linearMask();
    for (std::size_t k = 0; k < mask.size(); ++k) {
      require(qualifiedName(dyn.parameterNames()[k], l), mask[k], true);
    }
    require(qualifiedName("sigma", l), true, false);
    if (dyn.usesDelay()) require(qualifiedName("D", l), false, true);
  }
  if (star.size() + coord.size() != expected) {
    throw InvalidArgument("partition: names that do not belong to the model");
  }
}

// --- star update ---------------------------------------------------------------

StarUpdate mStepStar(const SwitchingModel& model, const TimeSeries& series,
                     const Eigen::MatrixXd& gamma, const ParameterPartition& partition,
                     double sigmaFloor) {
  if (gamma.rows() != series.sampleCount() ||
      gamma.cols() != static_cast<Eigen::Index>(model.layerCount())) {
    throw InvalidArgument("mStepStar: gamma does not match the model and series");
  }
  StarUpdate out{model, {}};
  for (std::size_t l = 0; l < model.layerCount(); ++l) {
    LayerProfile profile(series, model.step, column(gamma, static_cast<Eigen::Index>(l)),
                         starLinearFlags(model, partition, l), sigmaFloor);
    const auto solution = profile.solve(model.layers[l]);
    out.model.layers[l].params = solution.params;
    out.model.layers[l].sigma = solution.sigma;
    if (solution.ridge) out.ridgeLayers.push_back(l);
  }
  return out;
}

StarUpdate mStepStar(const SwitchingModel& model, const TimeSeries& series,
                     const Eigen::MatrixXd& gamma) {
  return mStepStar(model, series, gamma, defaultPartition(model));
}

// --- coordinate updates --------------------------------------------------------

SwitchingModel mStepCoord(const SwitchingModel& model, const TimeSeries& series,
                          const Eigen::MatrixXd& gamma, const ParameterPartition& partition,
                          const CoordOptions& options) {
  SwitchingModel out = model;
  std::vector<std::optional<LayerProfile>> profiles(model.layerCount());
  auto profileFor = [&](std::size_t l) -> LayerProfile& {
    if (!profiles[l]) {
      profiles[l].emplace(series, model.step, column(gamma, static_cast<Eigen::Index>(l)),
                          starLinearFlags(model, partition, l), options.sigmaFloor);
    }
    return *profiles[l];
  };

  for (const auto& name : partition.coord) {
    const auto q = parseQualifiedName(name);
    if (q.layer >= out.layerCount()) throw InvalidArgument("mStepCoord: unknown layer in " + name);
    LayerProfile& profile = profileFor(q.layer);
    LayerSpec candidate = out.layers[q.layer];
    const double incumbent = candidate.param(q.base);
    const bool isDelay = q.base == "D";

    if (isDelay && options.integerDelays) {
      double best = profile.solve(candidate).value;
      double bestDelay = incumbent;
      const auto lo = static_cast<long>(std::ceil(options.delayBounds.lower));
      const auto hi = static_cast<long>(std::floor(options.delayBounds.upper));
      for (long d = lo; d <= hi; ++d) {
        if (static_cast<double>(d) == incumbent) continue;
        candidate.delay = static_cast<double>(d);
        const double v = profile.solve(candidate).value;
        if (v > best) {
          best = v;
          bestDelay = candidate.delay;
        }
      }
      out.layers[q.layer].delay = bestDelay;
      continue;
    }

    const Interval bounds =
        isDelay ? options.delayBounds
                : candidate.dynamics->searchBounds(candidate.dynamics->parameterIndex(q.base),
                                                   model.step);
    if (!(bounds.width() > 0.0)) {
      candidate.setParam(q.base, bounds.lower);
      if (profile.solve(candidate).value > profile.solve(out.layers[q.layer]).value) {
        out.layers[q.layer].setParam(q.base, bounds.lower);
      }
      continue;
    }
    auto objective = [&](std::span<const double> v) {
      candidate.setParam(q.base, v[0]);
      return profile.solve(candidate).value;
    };
    const double incumbentValue = objective(std::span<const double>(&incumbent, 1));
    const double start = std::clamp(incumbent, bounds.lower, bounds.upper);
    const Interval box[] = {bounds};
    const auto result = maximize(objective, box, {start}, options.ars.forInterval(bounds),
                                 deriveSeed(options.seed, hashTag(q.base)));
    out.layers[q.layer].setParam(q.base, result.value > incumbentValue ? result.argmax[0] : incumbent);
  }
  return out;
}

SwitchingModel saemIteration(const SwitchingModel& model, const TimeSeries& series,
                             const SmoothingResult& posteriors,
                             const ParameterPartition& partition, const CoordOptions& options,
                             std::vector<std::string>* warnings) {
  const auto transition = mStepTransition(posteriors.xiSum, model.chain.transition);
  SwitchingModel next = mStepCoord(model, series, posteriors.gamma, partition, options);
  auto star = mStepStar(next, series, posteriors.gamma, partition, options.sigmaFloor);
  star.model.chain.transition = transition.transition;
  if (warnings) {
    for (auto row : transition.frozenRows) {
      warnings->push_back("transition row " + std::to_string(row + 1) + " kept (no posterior mass)");
    }
    for (auto l : star.ridgeLayers) {
      warnings->push_back("ridge-regularised least squares in layer " + std::to_string(l + 1));
    }
  }
  return std::move(star.model);
}

// --- drivers -------------------------------------------------------------------

SwitchingModel sampleInitialModel(const ModelTemplate& tmpl, const FitConfig& config,
                                  std::uint64_t seed) {
  const auto L = tmpl.layerCount();
  if (L == 0) throw InvalidArgument("sampleInitialModel: empty template");
  Rng rng = makeStream(seed, "initial-estimate");
  auto uniform = [&](const Interval& box) {
    return std::uniform_real_distribution<double>(box.lower, box.upper)(rng);
  };
  auto boxFor = [&](const std::string& base, const Interval& fallback) {
    const auto it = config.initialBoxes.find(base);
    return it == config.initialBoxes.end() ? fallback : it->second;
  };

  SwitchingModel model;
  model.step = tmpl.step;
  for (std::size_t l = 0; l < L; ++l) {
    const auto& dyn = tmpl.dynamics[l];
    LayerSpec layer;
    layer.dynamics = dyn;
    for (std::size_t k = 0; k < dyn->parameterCount(); ++k) {
      layer.params.push_back(uniform(boxFor(dyn->parameterNames()[k], dyn->initialBox(k))));
    }
    layer.sigma = uniform(boxFor("sigma", {0.05, 1.0}));
    if (!dyn->usesDelay()) {
      layer.delay = static_cast<double>(dyn->requiredHistory(0.0));
    } else {
      const Interval box = boxFor("D", config.delayBounds);
      if (config.integerDelays) {
        const auto lo = static_cast<long>(std::ceil(box.lower));
        const auto hi = static_cast<long>(std::floor(box.upper));
        layer.delay = static_cast<double>(std::uniform_int_distribution<long>(lo, hi)(rng));
      } else {
        layer.delay = uniform(box);
      }
    }
    model.layers.push_back(std::move(layer));
  }

  Eigen::MatrixXd M(static_cast<Eigen::Index>(L), static_cast<Eigen::Index>(L));
  std::exponential_distribution<double> expo(1.0);
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) M(i, j) = expo(rng);
    M.row(i) /= M.row(i).sum();
  }
  model.chain = MarkovChainSpec::withUniformInitial(M);
  model.validate();
  return model;
}

namespace {

std::size_t freeParameterCount(const SwitchingModel& model) {
  std::size_t count = model.layerCount() * model.layerCount();
  for (const auto& layer : model.layers) {
    count += layer.dynamics->parameterCount() + 1 + (layer.dynamics->usesDelay() ? 1 : 0);
  }
  return count;
}

}  // namespace

FitResult fitFrom(const TimeSeries& series, const SwitchingModel& initial,
                  const FitConfig& config, std::uint64_t seed) {
  config.validate();
  initial.validate();
  requireHistory(initial, series);
  const auto partition = defaultPartition(initial);
  validatePartition(initial, partition);
  if (static_cast<std::size_t>(series.sampleCount()) <= freeParameterCount(initial)) {
    throw InvalidArgument("fit: series is not longer than the number of free parameters");
  }
  const bool searchesDelays = std::any_of(initial.layers.begin(), initial.layers.end(),
                                          [](const LayerSpec& l) { return l.dynamics->usesDelay(); });
  if (searchesDelays &&
      series.historyLength() < static_cast<Index>(std::ceil(config.delayBounds.upper - kIntegerIndexTolerance))) {
    throw IndexOutOfRange("fit: the series history is shorter than the largest candidate delay");
  }

  CoordOptions options;
  options.integerDelays = config.integerDelays;
  options.delayBounds = config.delayBounds;
  options.ars = config.ars;
  options.sigmaFloor = config.sigmaFloor;

  FitResult result;
  result.model = initial;
  result.smoothing = eStep(initial, series);
  result.logLikTrace.push_back(result.smoothing.logLik);
  if (!result.smoothing.finite()) return result;

  for (std::size_t iter = 0; iter < config.maxIter; ++iter) {
    options.seed = deriveSeed(seed, hashTag("iteration"), iter);
    SwitchingModel next = saemIteration(result.model, series, result.smoothing, partition,
                                        options, &result.warnings);
    SmoothingResult posteriors = eStep(next, series);
    const double gain = posteriors.logLik - result.smoothing.logLik;
    result.model = std::move(next);
    result.smoothing = std::move(posteriors);
    result.logLikTrace.push_back(result.smoothing.logLik);
    if (!result.smoothing.finite()) break;
    if (gain < config.tolerance) {
      result.converged = true;
      break;
    }
  }
  return result;
}

std::uint64_t restartSeed(const FitConfig& config, std::size_t restart) {
  return deriveSeed(config.seed, hashTag("restart"), restart);
}

FitResult runRestart(const TimeSeries& series, const ModelTemplate& tmpl,
                     const FitConfig& config, std::size_t restart) {
  const std::uint64_t seed = restartSeed(config, restart);
  FitResult run = fitFrom(series, sampleInitialModel(tmpl, config, seed), config, seed);
  run.restartIndex = restart;
  run.restarts = {RestartSummary{restart, seed, run.logLikTrace.front(), run.logLik(),
                                 run.logLikTrace.size() - 1, run.converged}};
  return run;
}

FitResult bestRestart(std::vector<FitResult> runs, const FitConfig& config) {
  std::vector<RestartSummary> summaries;
  std::optional<std::size_t> best;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    summaries.insert(summaries.end(), runs[r].restarts.begin(), runs[r].restarts.end());
    if (!std::isfinite(runs[r].logLik())) continue;
    if (!best || runs[r].logLik() > runs[*best].logLik()) best = r;
  }
  if (!best) {
    std::ostringstream msg;
    msg << "fit: all " << runs.size() << " restarts ended with a non-finite likelihood"
        << " (seed " << config.seed << ");";
    for (const auto& s : summaries) {
      msg << " restart " << s.index << " (seed " << s.seed << "): initial " << s.initialLogLik
          << ", final " << s.finalLogLik << ";";
    }
    throw FitFailure(msg.str());
  }
  FitResult out = std::move(runs[*best]);
  out.restarts = std::move(summaries);
  return out;
}

FitResult fit(const TimeSeries& series, const ModelTemplate& tmpl, const FitConfig& config) {
  config.validate();
  std::vector<FitResult> runs(config.restarts);
  parallelFor(config.restarts, config.jobs,
              [&](std::size_t r) { runs[r] = runRestart(series, tmpl, config, r); });
  return bestRestart(std::move(runs), config);
}

}  // namespace cdnarms
