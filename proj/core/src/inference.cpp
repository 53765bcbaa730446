#include "cdnarms/inference.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace cdnarms {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

bool SmoothingResult::finite() const noexcept { return std::isfinite(logLik); }

Eigen::MatrixXd logDensityTable(const SwitchingModel& model, const TimeSeries& series) {
  model.validate();
  requireHistory(model, series);
  const Index T = series.lastIndex();
  const auto L = static_cast<Eigen::Index>(model.layerCount());
  const auto d = series.dim();
  Eigen::MatrixXd table(T + 1, L);
  std::vector<double> mean(d);
  for (Eigen::Index l = 0; l < L; ++l) {
    const auto& layer = model.layers[static_cast<std::size_t>(l)];
    const double var = model.step * layer.sigma * layer.sigma;
    const double norm = -0.5 * static_cast<double>(d) * std::log(2.0 * std::numbers::pi * var);
    for (Index n = 0; n <= T; ++n) {
      layer.dynamics->predictMean(series, n, layer.delay, layer.params, model.step, mean);
      const auto x = series.at(n);
      double sq = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        const double r = x[k] - mean[k];
        sq += r * r;
      }
      const double v = norm - 0.5 * sq / var;
      table(n, l) = std::isfinite(v) ? v : kNegInf;
    }
  }
  return table;
}

SmoothingResult forwardBackward(const SwitchingModel& model, const TimeSeries& series) {
  return forwardBackward(model.chain, logDensityTable(model, series));
}

SmoothingResult forwardBackward(const MarkovChainSpec& chain,
                                const Eigen::MatrixXd& logDensities) {
  const Eigen::Index N = logDensities.rows();  // T + 1
  const Eigen::Index L = logDensities.cols();
  const Eigen::MatrixXd& M = chain.transition;

  SmoothingResult out;
  out.gamma = Eigen::MatrixXd::Zero(N, L);
  out.xiSum = Eigen::MatrixXd::Zero(L, L);
  out.xi.assign(static_cast<std::size_t>(N > 0 ? N - 1 : 0), Eigen::MatrixXd::Zero(L, L));

  // Densities rescaled by the per-step maximum; the shift and the forward
  // normaliser both go into the log-likelihood.
  Eigen::MatrixXd dens(N, L);
  Eigen::VectorXd shift(N);
  for (Eigen::Index n = 0; n < N; ++n) {
    const double top = logDensities.row(n).maxCoeff();
    if (!std::isfinite(top)) {
      out.logLik = kNegInf;
      return out;
    }
    shift(n) = top;
    for (Eigen::Index l = 0; l < L; ++l) dens(n, l) = std::exp(logDensities(n, l) - top);
  }

  Eigen::MatrixXd alpha(N, L);
  Eigen::VectorXd scale(N);
  double logLik = 0.0;
  for (Eigen::Index n = 0; n < N; ++n) {
    if (n == 0) {
      alpha.row(0) = chain.initial.transpose().cwiseProduct(dens.row(0));
    } else {
      alpha.row(n) = (alpha.row(n - 1) * M).cwiseProduct(dens.row(n));
    }
    const double c = alpha.row(n).sum();
    if (!(c > 0.0) || !std::isfinite(c)) {
      out.logLik = kNegInf;
      return out;
    }
    alpha.row(n) /= c;
    scale(n) = c;
    logLik += std::log(c) + shift(n);
  }
  out.logLik = logLik;

  Eigen::RowVectorXd beta = Eigen::RowVectorXd::Ones(L);
  out.gamma.row(N - 1) = alpha.row(N - 1);
  for (Eigen::Index n = N - 1; n >= 1; --n) {
    const Eigen::RowVectorXd weighted = dens.row(n).cwiseProduct(beta) / scale(n);
    Eigen::MatrixXd& xi = out.xi[static_cast<std::size_t>(n - 1)];
    for (Eigen::Index i = 0; i < L; ++i) {
      for (Eigen::Index j = 0; j < L; ++j) xi(i, j) = alpha(n - 1, i) * M(i, j) * weighted(j);
    }
    const double total = xi.sum();
    if (total > 0.0) xi /= total;
    out.xiSum += xi;
    beta = (M * weighted.transpose()).transpose();
    Eigen::RowVectorXd g = alpha.row(n - 1).cwiseProduct(beta);
    const double gs = g.sum();
    out.gamma.row(n - 1) = gs > 0.0 ? Eigen::RowVectorXd(g / gs) : g;
  }
  return out;
}

}  // namespace cdnarms
