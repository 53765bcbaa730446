#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "cdnarms/layers.hpp"
#include "cdnarms/series.hpp"

namespace cdnarms {

inline constexpr double kStochasticTolerance = 1e-10;

/// Homogeneous Markov chain over layers {1..L}: transition(i, j) is
/// P(l_n = j | l_{n-1} = i) and `initial` is P0.
struct MarkovChainSpec {
  Eigen::MatrixXd transition;
  Eigen::VectorXd initial;

  std::size_t size() const noexcept { return static_cast<std::size_t>(initial.size()); }
  void validate() const;

  static MarkovChainSpec withUniformInitial(Eigen::MatrixXd transition);
};

/// One dynamical layer: shared dynamics plus its own delay D > 1, noise scale
/// sigma > 0 and parameter values (in dynamics->parameterNames() order).
struct LayerSpec {
  std::shared_ptr<const LayerDynamics> dynamics;
  double delay = 2.0;
  double sigma = 1.0;
  std::vector<double> params;

  double param(std::string_view name) const;
  void setParam(std::string_view name, double value);
  void validate() const;
};

/// Ghil layer with parameters (a, b, kappa, omega).
LayerSpec ghilLayer(double a, double b, double kappa, double omega, double sigma,
                    double delay);
/// AR(p) layer; the delay is set to p.
LayerSpec arLayer(std::vector<double> coefficients, double sigma);

/// Layer parameters are addressed as "name[l]" with l = 1..L; "sigma[l]" and
/// "D[l]" name the noise scale and delay.
struct QualifiedName {
  std::string base;
  std::size_t layer = 0;  // zero-based
};
QualifiedName parseQualifiedName(std::string_view name);
std::string qualifiedName(std::string_view base, std::size_t layer);

struct SwitchingModel {
  MarkovChainSpec chain;
  std::vector<LayerSpec> layers;
  double step = 1.0 / 12.0;  // h
  std::size_t dim = 1;

  std::size_t layerCount() const noexcept { return layers.size(); }
  /// max over layers of the history each prediction reads (>= ceil(D+)).
  Index requiredHistory() const;
  void validate() const;

  double get(std::string_view qualified) const;
  void set(std::string_view qualified, double value);

  /// Layer permutation: layer k of the result is layer order[k] of this model;
  /// M and P0 are permuted consistently.
  SwitchingModel permuted(const std::vector<std::size_t>& order) const;
};

/// The split of layer parameters (and delays) into block updates: `star`
/// entries are maximised exactly, `coord` entries one at a time by search.
/// Transition entries are always updated separately.
struct ParameterPartition {
  std::vector<std::string> star;
  std::vector<std::string> coord;
};

/// Linear parameters and sigma go to `star`, every nonlinear parameter and
/// each used delay go to `coord` in the order (param 1 over layers, param 2
/// over layers, ..., D over layers).
ParameterPartition defaultPartition(const SwitchingModel& model);

/// log p(x_n | x_{<n}, l_n = layer): Gaussian with the layer's predicted mean
/// and standard deviation sqrt(h) * sigma in every component.
double conditionalLogDensity(const SwitchingModel& model, const TimeSeries& series,
                             Index n, std::size_t layer);

/// Throws IndexOutOfRange if `series` lacks the history `model` reads.
void requireHistory(const SwitchingModel& model, const TimeSeries& series);

namespace presets {

/// Two Ghil layers, integer delays (5, 15), h = 1/12.
SwitchingModel ghilTwoLayer();
/// Three Ghil layers, integer delays (5, 10, 18), h = 1/12.
SwitchingModel ghilThreeLayer();
/// ghilTwoLayer with delays (3.5, 9.5).
SwitchingModel ghilTwoLayerFractional();

}  // namespace presets

}  // namespace cdnarms
