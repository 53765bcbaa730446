#include "cdnarms/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

namespace cdnarms {

namespace {

[[noreturn]] void invalid(const std::string& what) { throw InvalidArgument(what); }

}  // namespace

// --- MarkovChainSpec -----------------------------------------------------------

void MarkovChainSpec::validate() const {
  const auto L = initial.size();
  if (L == 0) invalid("MarkovChainSpec: empty chain");
  if (transition.rows() != L || transition.cols() != L) {
    invalid("MarkovChainSpec: transition matrix must be L x L");
  }
  for (Eigen::Index i = 0; i < L; ++i) {
    double rowSum = 0.0;
    for (Eigen::Index j = 0; j < L; ++j) {
      const double m = transition(i, j);
      if (!(m >= 0.0 && m <= 1.0)) invalid("MarkovChainSpec: entries must lie in [0, 1]");
      rowSum += m;
    }
    if (std::abs(rowSum - 1.0) > kStochasticTolerance) {
      invalid("MarkovChainSpec: row " + std::to_string(i + 1) + " does not sum to 1");
    }
  }
  if (initial.minCoeff() < 0.0 || std::abs(initial.sum() - 1.0) > kStochasticTolerance) {
    invalid("MarkovChainSpec: initial pmf must be nonnegative and sum to 1");
  }
}

MarkovChainSpec MarkovChainSpec::withUniformInitial(Eigen::MatrixXd transition) {
  const auto L = transition.rows();
  MarkovChainSpec chain{std::move(transition),
                        Eigen::VectorXd::Constant(L, 1.0 / static_cast<double>(L))};
  chain.validate();
  return chain;
}

// --- LayerSpec -----------------------------------------------------------------

double LayerSpec::param(std::string_view name) const {
  if (name == "sigma") return sigma;
  if (name == "D") return delay;
  return params.at(dynamics->parameterIndex(name));
}

void LayerSpec::setParam(std::string_view name, double value) {
  if (name == "sigma") {
    sigma = value;
  } else if (name == "D") {
    delay = value;
  } else {
    params.at(dynamics->parameterIndex(name)) = value;
  }
}

void LayerSpec::validate() const {
  if (!dynamics) invalid("LayerSpec: missing dynamics");
  if (params.size() != dynamics->parameterCount()) {
    invalid("LayerSpec: expected " + std::to_string(dynamics->parameterCount()) +
            " parameters for a " + dynamics->kind() + " layer");
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) invalid("LayerSpec: sigma must be > 0");
  if (dynamics->usesDelay() && (!(delay > 1.0) || !std::isfinite(delay))) {
    invalid("LayerSpec: delay must be > 1");
  }
  for (double p : params) {
    if (!std::isfinite(p)) invalid("LayerSpec: non-finite parameter");
  }
}

LayerSpec ghilLayer(double a, double b, double kappa, double omega, double sigma,
                    double delay) {
  return LayerSpec{ghilDynamics(), delay, sigma, {a, b, kappa, omega}};
}

LayerSpec arLayer(std::vector<double> coefficients, double sigma) {
  const auto p = coefficients.size();
  return LayerSpec{arDynamics(p), static_cast<double>(p), sigma, std::move(coefficients)};
}

// --- names ---------------------------------------------------------------------

QualifiedName parseQualifiedName(std::string_view name) {
  const auto open = name.find('[');
  if (open == std::string_view::npos || name.back() != ']' || open == 0) {
    invalid("malformed parameter name '" + std::string(name) + "' (expected name[l])");
  }
  const auto digits = name.substr(open + 1, name.size() - open - 2);
  std::size_t layer = 0;
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), layer);
  if (ec != std::errc{} || ptr != digits.data() + digits.size() || layer == 0) {
    invalid("malformed layer index in '" + std::string(name) + "'");
  }
  return {std::string(name.substr(0, open)), layer - 1};
}

std::string qualifiedName(std::string_view base, std::size_t layer) {
  return std::string(base) + "[" + std::to_string(layer + 1) + "]";
}

// --- SwitchingModel ------------------------------------------------------------

Index SwitchingModel::requiredHistory() const {
  Index h = 1;
  for (const auto& layer : layers) {
    h = std::max(h, layer.dynamics->requiredHistory(layer.delay));
  }
  return h;
}

void SwitchingModel::validate() const {
  chain.validate();
  if (layers.size() != chain.size()) invalid("SwitchingModel: layer count differs from chain size");
  if (!(step > 0.0)) invalid("SwitchingModel: time step must be > 0");
  if (dim == 0) invalid("SwitchingModel: dimension must be >= 1");
  for (const auto& layer : layers) layer.validate();
}

double SwitchingModel::get(std::string_view qualified) const {
  const auto q = parseQualifiedName(qualified);
  if (q.layer >= layers.size()) invalid("layer index out of range in '" + std::string(qualified) + "'");
  return layers[q.layer].param(q.base);
}

void SwitchingModel::set(std::string_view qualified, double value) {
  const auto q = parseQualifiedName(qualified);
  if (q.layer >= layers.size()) invalid("layer index out of range in '" + std::string(qualified) + "'");
  layers[q.layer].setParam(q.base, value);
}

SwitchingModel SwitchingModel::permuted(const std::vector<std::size_t>& order) const {
  const auto L = layerCount();
  if (order.size() != L) invalid("permuted: permutation size mismatch");
  std::vector<bool> seen(L, false);
  for (auto k : order) {
    if (k >= L || seen[k]) invalid("permuted: not a permutation");
    seen[k] = true;
  }
  SwitchingModel out = *this;
  for (std::size_t i = 0; i < L; ++i) {
    out.layers[i] = layers[order[i]];
    out.chain.initial(static_cast<Eigen::Index>(i)) = chain.initial(static_cast<Eigen::Index>(order[i]));
    for (std::size_t j = 0; j < L; ++j) {
      out.chain.transition(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          chain.transition(static_cast<Eigen::Index>(order[i]), static_cast<Eigen::Index>(order[j]));
    }
  }
  return out;
}

ParameterPartition defaultPartition(const SwitchingModel& model) {
  ParameterPartition partition;
  std::size_t maxParams = 0;
  for (std::size_t l = 0; l < model.layerCount(); ++l) {
    const auto& dyn = *model.layers[l].dynamics;
    const auto mask = dyn.linearMask();
    for (std::size_t k = 0; k < mask.size(); ++k) {
      if (mask[k]) partition.star.push_back(qualifiedName(dyn.parameterNames()[k], l));
    }
    partition.star.push_back(qualifiedName("sigma", l));
    maxParams = std::max(maxParams, mask.size());
  }
  for (std::size_t k = 0; k < maxParams; ++k) {
    for (std::size_t l = 0; l < model.layerCount(); ++l) {
      const auto& dyn = *model.layers[l].dynamics;
      const auto mask = dyn.linearMask();
      if (k < mask.size() && !mask[k]) {
        partition.coord.push_back(qualifiedName(dyn.parameterNames()[k], l));
      }
    }
  }
  for (std::size_t l = 0; l < model.layerCount(); ++l) {
    if (model.layers[l].dynamics->usesDelay()) partition.coord.push_back(qualifiedName("D", l));
  }
  return partition;
}

void requireHistory(const SwitchingModel& model, const TimeSeries& series) {
  const auto needed = model.requiredHistory();
  if (series.historyLength() < needed) {
    throw IndexOutOfRange("series provides " + std::to_string(series.historyLength()) +
                          " history samples; the model reads " + std::to_string(needed));
  }
  if (series.dim() != model.dim) invalid("series dimension differs from the model");
}

double conditionalLogDensity(const SwitchingModel& model, const TimeSeries& series,
                             Index n, std::size_t layer) {
  if (n < 0 || n > series.lastIndex()) {
    throw IndexOutOfRange("conditionalLogDensity: n outside [0, T]");
  }
  const auto& spec = model.layers.at(layer);
  if (n - spec.dynamics->requiredHistory(spec.delay) < -series.historyLength()) {
    throw IndexOutOfRange("conditionalLogDensity: insufficient history for n=" + std::to_string(n));
  }
  const auto d = series.dim();
  std::vector<double> mean(d);
  spec.dynamics->predictMean(series, n, spec.delay, spec.params, model.step, mean);
  const auto x = series.at(n);
  const double var = model.step * spec.sigma * spec.sigma;
  double sq = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    const double r = x[k] - mean[k];
    sq += r * r;
  }
  return -0.5 * static_cast<double>(d) * std::log(2.0 * std::numbers::pi * var) - 0.5 * sq / var;
}

// --- presets -------------------------------------------------------------------

namespace presets {

SwitchingModel ghilTwoLayer() {
  Eigen::MatrixXd M(2, 2);
  M << 0.6, 0.4, 0.3, 0.7;
  SwitchingModel model;
  model.chain = MarkovChainSpec::withUniformInitial(M);
  model.layers = {ghilLayer(10.0, 10.0, 3.0, 1.0 / 12.0, 0.3, 5.0),
                  ghilLayer(1.0, 1.0, 1.0, 1.0 / 3.0, 0.1, 15.0)};
  model.step = 1.0 / 12.0;
  return model;
}

SwitchingModel ghilThreeLayer() {
  Eigen::MatrixXd M(3, 3);
  M << 0.5, 0.3, 0.2, 0.2, 0.3, 0.5, 0.2, 0.6, 0.2;
  SwitchingModel model;
  model.chain = MarkovChainSpec::withUniformInitial(M);
  model.layers = {ghilLayer(10.0, 5.0, 3.0, 1.0 / 12.0, 0.4, 5.0),
                  ghilLayer(1.0, 1.0, 2.0, 1.0 / 3.0, 0.2, 10.0),
                  ghilLayer(2.0, 3.0, 1.0, 1.0 / 5.0, 0.1, 18.0)};
  model.step = 1.0 / 12.0;
  return model;
}

SwitchingModel ghilTwoLayerFractional() {
  auto model = ghilTwoLayer();
  model.layers[0].delay = 3.5;
  model.layers[1].delay = 9.5;
  return model;
}

}  // namespace presets

}  // namespace cdnarms
