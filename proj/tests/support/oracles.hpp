#pragma once

// Reference implementations used as test oracles. They are written directly
// from the model definition and share no code with the library beyond the
// data containers.

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "cdnarms/model.hpp"
#include "cdnarms/series.hpp"

namespace cdnarms::testing {

inline double linearInterp(const std::vector<double>& full, long history, double tau) {
  const double lo = std::floor(tau);
  const double frac = tau - lo;
  const auto i = static_cast<long>(lo) + history;
  if (frac == 0.0) return full[static_cast<std::size_t>(i)];
  return (1.0 - frac) * full[static_cast<std::size_t>(i)] + frac * full[static_cast<std::size_t>(i + 1)];
}

/// log N(x_n; x_{n-1} + h [b cos(2 pi w h (t-1)) - a tanh(k x~_{n-D})], h s^2).
inline double ghilLogDensity(const TimeSeries& series, const LayerSpec& layer, double h, long n) {
  const auto raw = series.raw();
  const std::vector<double> full(raw.begin(), raw.end());
  const long H = series.historyLength();
  const double a = layer.params[0], b = layer.params[1], k = layer.params[2], w = layer.params[3];
  const double delayed = linearInterp(full, H, static_cast<double>(n) - layer.delay);
  const double t = static_cast<double>(series.origin() + n);
  const double mean = full[static_cast<std::size_t>(n - 1 + H)] +
                      h * (b * std::cos(2.0 * std::numbers::pi * w * h * (t - 1.0)) -
                           a * std::tanh(k * delayed));
  const double var = h * layer.sigma * layer.sigma;
  const double r = full[static_cast<std::size_t>(n + H)] - mean;
  return -0.5 * std::log(2.0 * std::numbers::pi * var) - 0.5 * r * r / var;
}

struct Enumeration {
  double logLik = 0.0;
  Eigen::MatrixXd gamma;
  std::vector<Eigen::MatrixXd> xi;
};

/// Sums over all L^(T+1) regime paths of a Ghil-layer model.
inline Enumeration enumeratePaths(const SwitchingModel& model, const TimeSeries& series) {
  const auto L = static_cast<long>(model.layerCount());
  const long T = series.lastIndex();
  Eigen::MatrixXd dens(T + 1, L);
  for (long n = 0; n <= T; ++n) {
    for (long l = 0; l < L; ++l) {
      dens(n, l) = ghilLogDensity(series, model.layers[static_cast<std::size_t>(l)], model.step, n);
    }
  }
  std::vector<long> path(static_cast<std::size_t>(T + 1), 0);
  std::vector<double> logs;
  std::vector<std::vector<long>> paths;
  for (;;) {
    double lp = std::log(model.chain.initial(path[0])) + dens(0, path[0]);
    for (long n = 1; n <= T; ++n) {
      lp += std::log(model.chain.transition(path[static_cast<std::size_t>(n - 1)],
                                            path[static_cast<std::size_t>(n)])) +
            dens(n, path[static_cast<std::size_t>(n)]);
    }
    logs.push_back(lp);
    paths.push_back(path);
    long pos = 0;
    while (pos <= T && ++path[static_cast<std::size_t>(pos)] == L) path[static_cast<std::size_t>(pos++)] = 0;
    if (pos > T) break;
  }
  double top = -INFINITY;
  for (double v : logs) top = std::max(top, v);
  double sum = 0.0;
  for (double v : logs) sum += std::exp(v - top);

  Enumeration out;
  out.logLik = top + std::log(sum);
  out.gamma = Eigen::MatrixXd::Zero(T + 1, L);
  out.xi.assign(static_cast<std::size_t>(T), Eigen::MatrixXd::Zero(L, L));
  for (std::size_t p = 0; p < paths.size(); ++p) {
    const double w = std::exp(logs[p] - out.logLik);
    for (long n = 0; n <= T; ++n) out.gamma(n, paths[p][static_cast<std::size_t>(n)]) += w;
    for (long n = 1; n <= T; ++n) {
      out.xi[static_cast<std::size_t>(n - 1)](paths[p][static_cast<std::size_t>(n - 1)],
                                              paths[p][static_cast<std::size_t>(n)]) += w;
    }
  }
  return out;
}

inline Eigen::MatrixXd randomStochastic(long L, std::mt19937_64& rng) {
  std::exponential_distribution<double> e(1.0);
  Eigen::MatrixXd M(L, L);
  for (long i = 0; i < L; ++i) {
    for (long j = 0; j < L; ++j) M(i, j) = e(rng) + 0.05;
    M.row(i) /= M.row(i).sum();
  }
  return M;
}

/// Ghil model with L layers, parameters in moderate ranges and delays in
/// [minDelay, maxDelay] (fractional unless integerDelays).
inline SwitchingModel randomGhilModel(std::size_t L, std::mt19937_64& rng, double minDelay = 1.2,
                                      double maxDelay = 4.0, bool integerDelays = false) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto in = [&](double lo, double hi) { return lo + (hi - lo) * u(rng); };
  SwitchingModel m;
  m.step = 1.0 / 12.0;
  Eigen::MatrixXd M = randomStochastic(static_cast<long>(L), rng);
  m.chain.transition = M;
  Eigen::VectorXd p0 = randomStochastic(1, rng).row(0).transpose();
  if (L > 1) {
    p0 = Eigen::VectorXd(static_cast<long>(L));
    for (std::size_t l = 0; l < L; ++l) p0(static_cast<long>(l)) = in(0.1, 1.0);
    p0 /= p0.sum();
  }
  m.chain.initial = p0;
  for (std::size_t l = 0; l < L; ++l) {
    double D = in(minDelay, maxDelay);
    if (integerDelays) D = std::round(D);
    m.layers.push_back(ghilLayer(in(0.5, 5.0), in(0.5, 5.0), in(0.5, 3.0), in(0.05, 1.0),
                                 in(0.1, 1.0), D));
  }
  return m;
}

inline TimeSeries randomSeries(long history, long samples, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  std::vector<double> h(static_cast<std::size_t>(history)), v(static_cast<std::size_t>(samples));
  for (auto& x : h) x = g(rng);
  for (auto& x : v) x = g(rng);
  return TimeSeries(h, v);
}

}  // namespace cdnarms::testing
