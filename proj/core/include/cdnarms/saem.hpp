#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cdnarms/ars.hpp"
#include "cdnarms/inference.hpp"
#include "cdnarms/model.hpp"
#include "cdnarms/series.hpp"

namespace cdnarms {

/// ARS settings for one-dimensional coordinate updates, relative to the
/// search interval of the coordinate.
struct ArsOptions {
  double contraction = 2.0;
  std::size_t maxIter = 200;
  std::size_t stallLength = 0;
  double radiusFraction = 0.5;   // maxRadius = fraction * interval width
  double minRadiusRatio = 1e-4;  // minRadius = ratio * maxRadius

  ArsConfig forInterval(const Interval& interval) const;
};

struct FitConfig {
  std::size_t maxIter = 50;  // I; 0 evaluates the initial estimate only
  double tolerance = 1e-6;   // stop when one iteration gains less than this
  std::size_t restarts = 1;  // R
  bool integerDelays = false;
  Interval delayBounds{2.0, 24.0};
  ArsOptions ars;
  /// Initial-estimate boxes keyed by base parameter name ("a", "kappa",
  /// "sigma", "D", "c1", ...). Missing names fall back to the layer's
  /// initialBox(), [0.05, 1] for sigma and delayBounds for D.
  std::map<std::string, Interval> initialBoxes;
  double sigmaFloor = 1e-6;
  std::uint64_t seed = 1;
  unsigned jobs = 1;

  void validate() const;
};

/// Layer dynamics for a model with L layers; parameter values are drawn per
/// restart.
struct ModelTemplate {
  std::vector<std::shared_ptr<const LayerDynamics>> dynamics;
  double step = 1.0 / 12.0;

  std::size_t layerCount() const noexcept { return dynamics.size(); }
  static ModelTemplate uniform(std::shared_ptr<const LayerDynamics> dynamics,
                               std::size_t layers, double step);
};

struct RestartSummary {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  double initialLogLik = 0.0;
  double finalLogLik = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

struct FitResult {
  SwitchingModel model;
  /// Log-likelihood of the initial estimate followed by one entry per iteration.
  std::vector<double> logLikTrace;
  std::size_t restartIndex = 0;
  bool converged = false;
  SmoothingResult smoothing;
  std::vector<RestartSummary> restarts;
  /// Numerical events: ridge-regularised solves, frozen transition rows.
  std::vector<std::string> warnings;

  double logLik() const { return logLikTrace.back(); }
};

// --- expectation --------------------------------------------------------------

SmoothingResult eStep(const SwitchingModel& model, const TimeSeries& series);

/// Expected complete-data log-likelihood of `model` under posteriors computed
/// for some (possibly different) estimate.
struct ExpectedLogLik {
  double state = 0.0;       // sum_n sum_l gamma log p(x_n | ., l)
  double transition = 0.0;  // sum_n sum_ij xi log M_ij
  double initial = 0.0;     // sum_l gamma_0 log P0
  std::vector<double> perLayer;
  double total() const noexcept { return state + transition + initial; }
};
ExpectedLogLik expectedLogLik(const SwitchingModel& model, const TimeSeries& series,
                              const SmoothingResult& posteriors);

// --- maximisation -------------------------------------------------------------

struct TransitionUpdate {
  Eigen::MatrixXd transition;
  std::vector<std::size_t> frozenRows;  // rows without posterior mass
};

/// Row-normalised pairwise posterior counts: the exact maximiser of the
/// transition term over row-stochastic matrices.
TransitionUpdate mStepTransition(const Eigen::MatrixXd& xiSum, const Eigen::MatrixXd& previous);
TransitionUpdate mStepTransition(const std::vector<Eigen::MatrixXd>& xi,
                                 const Eigen::MatrixXd& previous);

/// Expected log-density of one layer, sum_n w_n log p(x_n | ., layer), and its
/// exact maximiser over the layer's star entries (linear parameters by
/// weighted least squares, then sigma in closed form) for fixed nonlinear
/// parameters and delay.
class LayerProfile {
 public:
  struct Solution {
    std::vector<double> params;
    double sigma = 0.0;
    double value = 0.0;
    bool ridge = false;
  };

  /// `starLinear` flags which linear parameters are re-solved; the remaining
  /// linear parameters keep the values of the layer passed to solve().
  LayerProfile(const TimeSeries& series, double step, std::span<const double> weights,
               std::vector<bool> starLinear, double sigmaFloor);

  Solution solve(const LayerSpec& layer);
  double value(const LayerSpec& layer);

  /// Weighted normal-equation residual G^T W (y - G theta) for `layer`.
  Eigen::VectorXd normalResidual(const LayerSpec& layer);

 private:
  // Refreshes the regressor columns whose inputs changed and the targets.
  void fillDesign(const LayerSpec& layer);
  double weightedRss(std::span<const double> theta) const;
  double evaluate(double rss, double sigma) const;
  const double* column(std::size_t k) const { return columns_.data() + k * sampleCount_; }
  std::vector<double> starTheta(const LayerSpec& layer) const;

  const TimeSeries& series_;
  double step_;
  std::span<const double> weights_;
  std::vector<bool> starLinear_;
  double sigmaFloor_;
  double totalWeight_ = 0.0;
  std::size_t sampleCount_ = 0;

  const LayerDynamics* dynamics_ = nullptr;
  std::vector<std::size_t> linearParams_;  // parameter index of each regressor
  std::vector<std::size_t> starColumns_;   // regressors solved for
  std::vector<std::vector<std::size_t>> inputs_;
  // Regressor columns followed by the offset column, each of length T+1,
  // with the input values they were computed for.
  std::vector<double> columns_;
  std::vector<std::vector<double>> columnKeys_;
  std::vector<bool> columnValid_;
  std::vector<double> target_;
};

struct StarUpdate {
  SwitchingModel model;
  std::vector<std::size_t> ridgeLayers;
};

/// Exact update of every star entry given gamma, with nonlinear parameters
/// and delays held at their current values.
StarUpdate mStepStar(const SwitchingModel& model, const TimeSeries& series,
                     const Eigen::MatrixXd& gamma, const ParameterPartition& partition,
                     double sigmaFloor = 1e-6);
StarUpdate mStepStar(const SwitchingModel& model, const TimeSeries& series,
                     const Eigen::MatrixXd& gamma);

struct CoordOptions {
  bool integerDelays = false;
  Interval delayBounds{2.0, 24.0};
  ArsOptions ars;
  double sigmaFloor = 1e-6;
  std::uint64_t seed = 1;
};

/// Updates the coord entries one at a time in partition order. Each candidate
/// value is scored by the profile objective (star entries re-solved); the
/// incumbent is always a candidate, so no update lowers the objective.
/// Integer delays are enumerated over delayBounds; everything else uses ARS.
/// The ARS stream depends on the iteration seed and the parameter base name
/// only, so relabelling layers does not change the draws a layer sees.
SwitchingModel mStepCoord(const SwitchingModel& model, const TimeSeries& series,
                          const Eigen::MatrixXd& gamma, const ParameterPartition& partition,
                          const CoordOptions& options);

/// Checks that `partition` covers every layer parameter exactly once with
/// sigma in star and nonlinear parameters and delays in coord.
void validatePartition(const SwitchingModel& model, const ParameterPartition& partition);

/// One SA-EM sweep: transition update, coordinate updates, star update.
SwitchingModel saemIteration(const SwitchingModel& model, const TimeSeries& series,
                             const SmoothingResult& posteriors,
                             const ParameterPartition& partition, const CoordOptions& options,
                             std::vector<std::string>* warnings = nullptr);

// --- drivers ------------------------------------------------------------------

/// Draws a restart's initial estimate: parameters uniform on their boxes,
/// transition rows uniform on the simplex, P0 uniform.
SwitchingModel sampleInitialModel(const ModelTemplate& tmpl, const FitConfig& config,
                                  std::uint64_t seed);

/// Runs SA-EM from one initial estimate.
FitResult fitFrom(const TimeSeries& series, const SwitchingModel& initial,
                  const FitConfig& config, std::uint64_t seed);

/// Seed of restart r; fit() and selectLayers() draw the same initial estimates.
std::uint64_t restartSeed(const FitConfig& config, std::size_t restart);

/// Runs restart r of fit(): draws its initial estimate and fits from it.
FitResult runRestart(const TimeSeries& series, const ModelTemplate& tmpl,
                     const FitConfig& config, std::size_t restart);

/// Keeps the run with the highest final log-likelihood and attaches the
/// summaries of all runs. Throws FitFailure if no run has a finite likelihood.
FitResult bestRestart(std::vector<FitResult> runs, const FitConfig& config);

/// Best of config.restarts independent runs (highest final log-likelihood).
/// Throws FitFailure when every restart has a non-finite likelihood.
FitResult fit(const TimeSeries& series, const ModelTemplate& tmpl, const FitConfig& config);

}  // namespace cdnarms
