#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "cdnarms/layers.hpp"

namespace cdnarms {

/// Accelerated random search settings. Proposals are drawn uniformly in the
/// ball of the current radius around the incumbent and clipped to the box.
struct ArsConfig {
  double minRadius = 1e-4;
  double maxRadius = 1.0;
  double contraction = 2.0;
  std::size_t maxIter = 200;
  /// Stop after this many consecutive rejections; 0 runs all maxIter steps.
  std::size_t stallLength = 0;

  /// maxRadius = half the widest box side, minRadius = 1e-4 * maxRadius.
  static ArsConfig forBox(std::span<const Interval> box, std::size_t maxIter = 200);
  void validate(std::span<const Interval> box) const;
};

struct ArsResult {
  std::vector<double> argmax;
  double value = 0.0;
  std::size_t evaluations = 0;
  /// Objective value after each accepted move, starting with f(start).
  std::vector<double> acceptedValues;
};

using Objective = std::function<double(std::span<const double>)>;

/// Maximises f over `box` from `start`. Only strict improvements are accepted,
/// so the result is never worse than f(start). Non-finite proposals count as
/// rejections. Throws InvalidArgument when f(start) is not finite or start is
/// outside the box.
ArsResult maximize(const Objective& f, std::span<const Interval> box,
                   std::vector<double> start, const ArsConfig& config,
                   std::uint64_t seed);

}  // namespace cdnarms
