#include "cdnarms/stability.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Eigenvalues>

namespace cdnarms {

namespace {

void requireStochastic(const Eigen::MatrixXd& M) {
  if (M.rows() == 0 || M.rows() != M.cols()) {
    throw InvalidArgument("transition matrix must be square and non-empty");
  }
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    if ((M.row(i).array() < 0.0).any() || std::abs(M.row(i).sum() - 1.0) > kStochasticTolerance) {
      throw InvalidArgument("transition matrix row " + std::to_string(i + 1) +
                            " is not a probability vector");
    }
  }
}

std::vector<bool> reachable(const Eigen::MatrixXd& M, Eigen::Index from) {
  std::vector<bool> seen(static_cast<std::size_t>(M.rows()), false);
  std::vector<Eigen::Index> stack{from};
  seen[static_cast<std::size_t>(from)] = true;
  while (!stack.empty()) {
    const auto i = stack.back();
    stack.pop_back();
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      if (M(i, j) > 0.0 && !seen[static_cast<std::size_t>(j)]) {
        seen[static_cast<std::size_t>(j)] = true;
        stack.push_back(j);
      }
    }
  }
  return seen;
}

}  // namespace

bool isIrreducible(const Eigen::MatrixXd& transition) {
  for (Eigen::Index i = 0; i < transition.rows(); ++i) {
    for (bool r : reachable(transition, i)) {
      if (!r) return false;
    }
  }
  return true;
}

Eigen::VectorXd stationaryDistribution(const Eigen::MatrixXd& transition) {
  requireStochastic(transition);
  if (!isIrreducible(transition)) {
    throw InvalidArgument("stationary distribution: the chain is reducible");
  }
  const auto L = transition.rows();
  // (M^T - I) pi = 0 with the last equation replaced by sum(pi) = 1.
  Eigen::MatrixXd A = transition.transpose() - Eigen::MatrixXd::Identity(L, L);
  A.row(L - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(L);
  rhs(L - 1) = 1.0;
  Eigen::VectorXd pi = A.fullPivLu().solve(rhs);
  pi = pi.cwiseMax(0.0);
  return pi / pi.sum();
}

Eigen::MatrixXd momentMatrix(const Eigen::MatrixXd& transition,
                             const std::vector<double>& lipschitz, double order) {
  if (static_cast<Eigen::Index>(lipschitz.size()) != transition.cols()) {
    throw InvalidArgument("momentMatrix: one Lipschitz constant per layer required");
  }
  Eigen::MatrixXd out = transition;
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    out.col(j) *= std::pow(std::numbers::sqrt2 * lipschitz[static_cast<std::size_t>(j)], order);
  }
  return out;
}

SpectralRadius spectralRadius(const Eigen::MatrixXd& matrix, double tolerance,
                              std::size_t maxIter) {
  if (matrix.rows() != matrix.cols() || matrix.rows() == 0) {
    throw InvalidArgument("spectralRadius: square non-empty matrix required");
  }
  if ((matrix.array() < 0.0).any()) {
    throw InvalidArgument("spectralRadius: matrix must be entrywise nonnegative");
  }
  SpectralRadius out;
  const double scale = matrix.cwiseAbs().rowwise().sum().maxCoeff();
  if (scale == 0.0) {
    out.converged = true;
    return out;
  }
  // The shift makes the dominant eigenvalue of B simple and strictly largest
  // in modulus, so the iteration also converges for periodic matrices.
  const Eigen::Index n = matrix.rows();
  const Eigen::MatrixXd B = matrix / scale + Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd x = Eigen::VectorXd::Ones(n) / static_cast<double>(n);
  for (out.iterations = 1; out.iterations <= maxIter; ++out.iterations) {
    const Eigen::VectorXd y = B * x;
    if ((x.array() <= 0.0).any()) break;
    const Eigen::ArrayXd ratio = y.array() / x.array();
    const double lo = ratio.minCoeff();
    const double hi = ratio.maxCoeff();
    out.lowerBound = (lo - 1.0) * scale;
    out.upperBound = (hi - 1.0) * scale;
    x = y / y.sum();
    if (hi - lo <= tolerance * hi) {
      // Rayleigh quotient on the final iterate.
      const Eigen::VectorXd Bx = B * x;
      const double rayleigh = x.dot(Bx) / x.dot(x);
      out.value = (std::clamp(rayleigh, lo, hi) - 1.0) * scale;
      out.converged = true;
      return out;
    }
  }
  Eigen::EigenSolver<Eigen::MatrixXd> solver(matrix, false);
  out.value = solver.eigenvalues().cwiseAbs().maxCoeff();
  out.lowerBound = out.upperBound = out.value;
  return out;
}

StabilityReport certify(const Eigen::MatrixXd& transition, const std::vector<double>& lipschitz,
                        const std::vector<double>& orders, double growthThreshold) {
  requireStochastic(transition);
  if (static_cast<Eigen::Index>(lipschitz.size()) != transition.cols()) {
    throw InvalidArgument("certify: one Lipschitz constant per layer required");
  }
  StabilityReport report;
  report.lipschitz = lipschitz;
  report.growthThreshold = growthThreshold;
  for (double k : lipschitz) {
    if (std::isnan(k)) {
      report.complete = false;
    } else if (k < 0.0) {
      throw InvalidArgument("certify: Lipschitz constants must be nonnegative");
    }
    report.clamped.push_back(std::isnan(k) ? k : std::max(1.0, k));
  }

  if (isIrreducible(transition)) {
    report.stationary = stationaryDistribution(transition);
  } else {
    report.complete = false;
    report.notes.push_back("transition matrix is reducible: no unique stationary distribution");
  }

  if (!report.complete) {
    report.notes.push_back("checks skipped: missing Lipschitz bound or stationary distribution");
    report.averageLogGrowth = std::numeric_limits<double>::quiet_NaN();
    return report;
  }

  for (std::size_t l = 0; l < report.clamped.size(); ++l) {
    report.averageLogGrowth += report.stationary(static_cast<Eigen::Index>(l)) *
                               std::log(std::numbers::sqrt2 * report.clamped[l]);
  }
  report.growthBelowThreshold = report.averageLogGrowth < growthThreshold;
  report.growthNegative = report.averageLogGrowth < 0.0;

  for (double s : orders) {
    if (!(s > 0.0)) throw InvalidArgument("certify: moment orders must be positive");
    MomentCheck check;
    check.order = s;
    check.matrix = momentMatrix(transition, lipschitz, s);
    check.radius = spectralRadius(check.matrix);
    check.finite = check.radius.value < 1.0;
    report.moments.push_back(std::move(check));
  }
  return report;
}

StabilityReport certify(const SwitchingModel& model, const std::vector<double>& orders,
                        double growthThreshold) {
  std::vector<double> lipschitz;
  std::vector<std::string> missing;
  for (std::size_t l = 0; l < model.layerCount(); ++l) {
    const auto& layer = model.layers[l];
    const auto k = layer.dynamics->lipschitzBound(layer.params, model.step);
    if (!k) missing.push_back(layer.dynamics->kind() + " layer " + std::to_string(l + 1));
    lipschitz.push_back(k.value_or(std::numeric_limits<double>::quiet_NaN()));
  }
  auto report = certify(model.chain.transition, lipschitz, orders, growthThreshold);
  for (const auto& m : missing) report.notes.push_back("no Lipschitz bound for " + m);
  return report;
}

}  // namespace cdnarms
