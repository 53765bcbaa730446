#include "cdnarms/layers.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace cdnarms {

namespace {
constexpr double kUnbounded = 1e6;
}

void LayerDynamics::linearDesign(const TimeSeries& series, Index n, double delay,
                                 std::span<const double> params, double step,
                                 double& offset, std::span<double> regressors) const {
  if (series.dim() != 1) {
    throw InvalidArgument("linearDesign: only scalar series are supported");
  }
  const auto mask = linearMask();
  std::vector<double> probe(params.begin(), params.end());
  for (std::size_t k = 0; k < mask.size(); ++k) {
    if (mask[k]) probe[k] = 0.0;
  }
  double mean = 0.0;
  predictMean(series, n, delay, probe, step, {&mean, 1});
  offset = mean;
  std::size_t r = 0;
  for (std::size_t k = 0; k < mask.size(); ++k) {
    if (!mask[k]) continue;
    probe[k] = 1.0;
    predictMean(series, n, delay, probe, step, {&mean, 1});
    regressors[r++] = mean - offset;
    probe[k] = 0.0;
  }
}

void LayerDynamics::designColumn(const TimeSeries& series, double delay,
                                 std::span<const double> params, double step, std::size_t k,
                                 std::span<double> out) const {
  const auto mask = linearMask();
  std::vector<double> regressors(static_cast<std::size_t>(std::count(mask.begin(), mask.end(), true)));
  double offset = 0.0;
  for (Index n = 0; n <= series.lastIndex(); ++n) {
    linearDesign(series, n, delay, params, step, offset, regressors);
    out[static_cast<std::size_t>(n)] = k < regressors.size() ? regressors[k] : offset;
  }
}

std::optional<double> LayerDynamics::lipschitzBound(std::span<const double>,
                                                    double) const {
  return std::nullopt;
}

Index LayerDynamics::requiredHistory(double delay) const {
  if (!usesDelay()) return 1;
  return std::max<Index>(1, static_cast<Index>(std::ceil(delay - kIntegerIndexTolerance)));
}

Interval LayerDynamics::searchBounds(std::size_t, double) const {
  return {-kUnbounded, kUnbounded};
}

Interval LayerDynamics::initialBox(std::size_t) const { return {-1.0, 1.0}; }

std::size_t LayerDynamics::parameterIndex(std::string_view name) const {
  const auto& names = parameterNames();
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) {
    std::ostringstream msg;
    msg << kind() << " layer has no parameter '" << name << "'";
    throw InvalidArgument(msg.str());
  }
  return static_cast<std::size_t>(it - names.begin());
}

// --- Ghil ------------------------------------------------------------------

const std::vector<std::string>& GhilDynamics::parameterNames() const {
  static const std::vector<std::string> names{"a", "b", "kappa", "omega"};
  return names;
}

double GhilDynamics::forcingPhase(const TimeSeries& series, Index n, double omega,
                                  double step) {
  const auto t = static_cast<double>(series.origin() + n - 1);
  return 2.0 * std::numbers::pi * omega * step * t;
}

void GhilDynamics::predictMean(const TimeSeries& series, Index n, double delay,
                               std::span<const double> params, double step,
                               std::span<double> mean) const {
  const double delayed = interpolateScalar(series, static_cast<double>(n) - delay);
  const double forcing = std::cos(forcingPhase(series, n, params[kOmega], step));
  mean[0] = series[n - 1] +
            step * (params[kB] * forcing - params[kA] * std::tanh(params[kKappa] * delayed));
}

void GhilDynamics::linearDesign(const TimeSeries& series, Index n, double delay,
                                std::span<const double> params, double step,
                                double& offset, std::span<double> regressors) const {
  const double delayed = interpolateScalar(series, static_cast<double>(n) - delay);
  offset = series[n - 1];
  regressors[0] = -step * std::tanh(params[kKappa] * delayed);
  regressors[1] = step * std::cos(forcingPhase(series, n, params[kOmega], step));
}

std::vector<std::vector<std::size_t>> GhilDynamics::designInputs() const {
  return {{kKappa, kOmega + 1}, {kOmega}, {}};  // kOmega + 1 is the delay
}

void GhilDynamics::designColumn(const TimeSeries& series, double delay,
                                std::span<const double> params, double step, std::size_t k,
                                std::span<double> out) const {
  const Index T = series.lastIndex();
  switch (k) {
    case 0: {
      const double kappa = params[kKappa];
      for (Index n = 0; n <= T; ++n) {
        const double delayed = interpolateScalar(series, static_cast<double>(n) - delay);
        out[static_cast<std::size_t>(n)] = -step * std::tanh(kappa * delayed);
      }
      break;
    }
    case 1:
      for (Index n = 0; n <= T; ++n) {
        out[static_cast<std::size_t>(n)] =
            step * std::cos(forcingPhase(series, n, params[kOmega], step));
      }
      break;
    default:
      for (Index n = 0; n <= T; ++n) out[static_cast<std::size_t>(n)] = series[n - 1];
  }
}

std::optional<double> GhilDynamics::lipschitzBound(std::span<const double> params,
                                                   double step) const {
  const double slope = step * std::abs(params[kA]) * params[kKappa];
  return std::sqrt(1.0 + slope * slope);
}

Interval GhilDynamics::searchBounds(std::size_t paramIndex, double step) const {
  switch (paramIndex) {
    case kKappa: return {1e-6, 1000.0};
    case kOmega: return {1e-6, 0.5 / step};
    default: return {-kUnbounded, kUnbounded};
  }
}

Interval GhilDynamics::initialBox(std::size_t paramIndex) const {
  switch (paramIndex) {
    case kA:
    case kB: return {0.1, 20.0};
    case kKappa: return {0.1, 5.0};
    case kOmega: return {0.01, 1.0};
    default: return {0.0, 1.0};
  }
}

// --- AR(p) -----------------------------------------------------------------

ArDynamics::ArDynamics(std::size_t order) : order_(order) {
  if (order == 0) throw InvalidArgument("ArDynamics: order must be >= 1");
  for (std::size_t j = 1; j <= order; ++j) names_.push_back("c" + std::to_string(j));
}

std::vector<bool> ArDynamics::linearMask() const { return std::vector<bool>(order_, true); }

void ArDynamics::predictMean(const TimeSeries& series, Index n, double,
                             std::span<const double> params, double,
                             std::span<double> mean) const {
  double acc = 0.0;
  for (std::size_t j = 0; j < order_; ++j) {
    acc += params[j] * series[n - static_cast<Index>(j) - 1];
  }
  mean[0] = acc;
}

void ArDynamics::linearDesign(const TimeSeries& series, Index n, double,
                              std::span<const double>, double, double& offset,
                              std::span<double> regressors) const {
  offset = 0.0;
  for (std::size_t j = 0; j < order_; ++j) {
    regressors[j] = series[n - static_cast<Index>(j) - 1];
  }
}

std::vector<std::vector<std::size_t>> ArDynamics::designInputs() const {
  return std::vector<std::vector<std::size_t>>(order_ + 1);
}

void ArDynamics::designColumn(const TimeSeries& series, double, std::span<const double>,
                              double, std::size_t k, std::span<double> out) const {
  for (Index n = 0; n <= series.lastIndex(); ++n) {
    out[static_cast<std::size_t>(n)] =
        k < order_ ? series[n - static_cast<Index>(k) - 1] : 0.0;
  }
}

std::optional<double> ArDynamics::lipschitzBound(std::span<const double> params,
                                                 double) const {
  double sq = 0.0;
  for (double c : params) sq += c * c;
  return std::sqrt(sq);
}

Index ArDynamics::requiredHistory(double) const { return static_cast<Index>(order_); }

Interval ArDynamics::initialBox(std::size_t) const { return {-0.5, 0.5}; }

std::shared_ptr<const LayerDynamics> ghilDynamics() {
  static const auto instance = std::make_shared<const GhilDynamics>();
  return instance;
}

std::shared_ptr<const LayerDynamics> arDynamics(std::size_t order) {
  return std::make_shared<const ArDynamics>(order);
}

}  // namespace cdnarms
