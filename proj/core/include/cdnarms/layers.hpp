#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cdnarms/series.hpp"

namespace cdnarms {

/// Closed interval used for search and initialisation boxes.
struct Interval {
  double lower = 0.0;
  double upper = 0.0;
  double width() const noexcept { return upper - lower; }
  bool contains(double v) const noexcept { return v >= lower && v <= upper; }
};

/// The deterministic part phi[l] of one layer. Implementations are immutable
/// and shared between models.
///
/// A parameter flagged as linear must enter the predicted mean affinely when
/// the others are held fixed; the fitter solves for those in closed form.
class LayerDynamics {
 public:
  virtual ~LayerDynamics() = default;

  virtual std::string kind() const = 0;
  virtual const std::vector<std::string>& parameterNames() const = 0;
  virtual std::vector<bool> linearMask() const = 0;

  /// Predicted mean of x_n. `n` indexes `series`; `step` is the time step h.
  virtual void predictMean(const TimeSeries& series, Index n, double delay,
                           std::span<const double> params, double step,
                           std::span<double> mean) const = 0;

  /// Scalar decomposition mean = offset + sum_k theta_k * regressors[k] over
  /// the linear parameters (in parameterNames() order). The default probes
  /// predictMean; built-in layers override it.
  virtual void linearDesign(const TimeSeries& series, Index n, double delay,
                            std::span<const double> params, double step,
                            double& offset, std::span<double> regressors) const;

  /// Inputs of each linearDesign term for column caching: entry k < K lists
  /// the parameter indices regressor k reads and entry K those of the offset;
  /// index parameterCount() stands for the delay. Empty means unknown.
  virtual std::vector<std::vector<std::size_t>> designInputs() const { return {}; }
  /// Regressor k (or the offset when k == K) of linearDesign for samples
  /// 0..T. The default evaluates linearDesign sample by sample.
  virtual void designColumn(const TimeSeries& series, double delay,
                            std::span<const double> params, double step, std::size_t k,
                            std::span<double> out) const;
  /// Lipschitz constant of the map (x_{n-1}, x~_{n-D}) -> mean, if known.
  virtual std::optional<double> lipschitzBound(std::span<const double> params,
                                               double step) const;

  /// False when the delay is bookkeeping only (AR layers).
  virtual bool usesDelay() const { return true; }

  /// Number of samples before n the prediction of x_n reads.
  virtual Index requiredHistory(double delay) const;

  /// Search box for a nonlinear parameter during coordinate updates.
  virtual Interval searchBounds(std::size_t paramIndex, double step) const;

  /// Box used to draw initial estimates.
  virtual Interval initialBox(std::size_t paramIndex) const;

  std::size_t parameterCount() const { return parameterNames().size(); }
  /// Index of `name` in parameterNames(); throws InvalidArgument if absent.
  std::size_t parameterIndex(std::string_view name) const;
};

/// Euler-Maruyama step of the delayed Ghil oscillator
///   mean = x_{n-1} + h [ b cos(2 pi omega h (t-1)) - a tanh(kappa x~_{n-D}) ]
/// with t the absolute time index. Parameters: a, b, kappa, omega.
class GhilDynamics final : public LayerDynamics {
 public:
  enum Param : std::size_t { kA = 0, kB = 1, kKappa = 2, kOmega = 3 };

  std::string kind() const override { return "ghil"; }
  const std::vector<std::string>& parameterNames() const override;
  std::vector<bool> linearMask() const override { return {true, true, false, false}; }

  void predictMean(const TimeSeries& series, Index n, double delay,
                   std::span<const double> params, double step,
                   std::span<double> mean) const override;
  void linearDesign(const TimeSeries& series, Index n, double delay,
                    std::span<const double> params, double step, double& offset,
                    std::span<double> regressors) const override;
  std::vector<std::vector<std::size_t>> designInputs() const override;
  void designColumn(const TimeSeries& series, double delay, std::span<const double> params,
                    double step, std::size_t k, std::span<double> out) const override;
  /// sqrt(1 + (h |a| kappa)^2).
  std::optional<double> lipschitzBound(std::span<const double> params,
                                       double step) const override;
  /// kappa in (0, 1000]; omega in (0, 1/(2h)], the Nyquist limit of the grid.
  Interval searchBounds(std::size_t paramIndex, double step) const override;
  Interval initialBox(std::size_t paramIndex) const override;

  /// Forcing phase 2 pi omega h (t - 1) at series index n.
  static double forcingPhase(const TimeSeries& series, Index n, double omega, double step);
};

/// Linear autoregression mean = sum_j c_j x_{n-j}, j = 1..p. The delay is
/// unused; it is pinned to p so history accounting stays uniform.
class ArDynamics final : public LayerDynamics {
 public:
  explicit ArDynamics(std::size_t order);

  std::size_t order() const noexcept { return order_; }

  std::string kind() const override { return "ar"; }
  const std::vector<std::string>& parameterNames() const override { return names_; }
  std::vector<bool> linearMask() const override;

  void predictMean(const TimeSeries& series, Index n, double delay,
                   std::span<const double> params, double step,
                   std::span<double> mean) const override;
  void linearDesign(const TimeSeries& series, Index n, double delay,
                    std::span<const double> params, double step, double& offset,
                    std::span<double> regressors) const override;
  std::vector<std::vector<std::size_t>> designInputs() const override;
  void designColumn(const TimeSeries& series, double delay, std::span<const double> params,
                    double step, std::size_t k, std::span<double> out) const override;
  /// Euclidean norm of the coefficient vector.
  std::optional<double> lipschitzBound(std::span<const double> params,
                                       double step) const override;
  bool usesDelay() const override { return false; }
  Index requiredHistory(double delay) const override;
  Interval initialBox(std::size_t paramIndex) const override;

 private:
  std::size_t order_;
  std::vector<std::string> names_;
};

std::shared_ptr<const LayerDynamics> ghilDynamics();
std::shared_ptr<const LayerDynamics> arDynamics(std::size_t order);

}  // namespace cdnarms
