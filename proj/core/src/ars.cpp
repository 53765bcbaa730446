#include "cdnarms/ars.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "cdnarms/error.hpp"
#include "cdnarms/random.hpp"

namespace cdnarms {

ArsConfig ArsConfig::forBox(std::span<const Interval> box, std::size_t maxIter) {
  double widest = 0.0;
  for (const auto& side : box) widest = std::max(widest, side.width());
  ArsConfig config;
  config.maxRadius = 0.5 * widest;
  config.minRadius = 1e-4 * config.maxRadius;
  config.maxIter = maxIter;
  return config;
}

void ArsConfig::validate(std::span<const Interval> box) const {
  if (!(minRadius > 0.0) || !(maxRadius > minRadius)) {
    throw InvalidArgument("ArsConfig: need 0 < minRadius < maxRadius");
  }
  if (!(contraction > 1.0)) throw InvalidArgument("ArsConfig: contraction factor must be > 1");
  if (box.empty()) throw InvalidArgument("ArsConfig: empty search box");
  for (const auto& side : box) {
    if (!(side.lower < side.upper)) throw InvalidArgument("ArsConfig: box side with lower >= upper");
  }
}

ArsResult maximize(const Objective& f, std::span<const Interval> box,
                   std::vector<double> start, const ArsConfig& config,
                   std::uint64_t seed) {
  config.validate(box);
  const std::size_t dim = box.size();
  if (start.size() != dim) throw InvalidArgument("maximize: start has the wrong dimension");
  for (std::size_t k = 0; k < dim; ++k) {
    if (!box[k].contains(start[k])) throw InvalidArgument("maximize: start lies outside the box");
  }

  ArsResult result;
  result.argmax = std::move(start);
  result.value = f(result.argmax);
  result.evaluations = 1;
  if (!std::isfinite(result.value)) throw InvalidArgument("maximize: objective is not finite at start");
  result.acceptedValues.push_back(result.value);

  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> proposal(dim);
  std::vector<double> direction(dim);

  double radius = config.maxRadius;
  std::size_t rejections = 0;
  for (std::size_t iter = 0; iter < config.maxIter; ++iter) {
    // Uniform point in the open ball: Gaussian direction, radius r U^{1/d}.
    double norm = 0.0;
    for (auto& v : direction) {
      v = normal(rng);
      norm += v * v;
    }
    norm = std::sqrt(norm);
    const double reach = radius * std::pow(unif(rng), 1.0 / static_cast<double>(dim));
    for (std::size_t k = 0; k < dim; ++k) {
      const double step = norm > 0.0 ? reach * direction[k] / norm : 0.0;
      proposal[k] = std::clamp(result.argmax[k] + step, box[k].lower, box[k].upper);
    }

    const double value = f(proposal);
    ++result.evaluations;
    if (std::isfinite(value) && value > result.value) {
      result.argmax = proposal;
      result.value = value;
      result.acceptedValues.push_back(value);
      radius = config.maxRadius;
      rejections = 0;
    } else {
      radius /= config.contraction;
      ++rejections;
      if (config.stallLength > 0 && rejections >= config.stallLength) break;
    }
    if (radius < config.minRadius) radius = config.maxRadius;
  }
  return result;
}

}  // namespace cdnarms
