#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "cdnarms/model.hpp"
#include "cdnarms/series.hpp"

namespace cdnarms {

struct SimulationResult {
  TimeSeries series;
  std::vector<std::size_t> regimes;  // l_0..l_T, zero-based
};

struct SimulationOptions {
  /// Pre-sample history x_{-H..-1} (dim values per sample). When absent, H
  /// samples are drawn i.i.d. N(0, 1).
  std::optional<std::vector<double>> initialHistory;
  /// Minimum H for drawn histories; the model's own requirement always wins.
  Index historyLength = 0;
};

/// Draws l_0 ~ P0, l_n ~ M(l_{n-1}, .) and
///   x_n = phi[l_n](x_{n-1}, x~_{n-D[l_n]}) + sqrt(h) sigma[l_n] u_n
/// for `length` samples. Regimes, noise and history come from separate
/// streams derived from `seed`, so a shorter run is a prefix of a longer one.
SimulationResult simulate(const SwitchingModel& model, Index length, std::uint64_t seed,
                          const SimulationOptions& options = {});

/// Integrates the model on the finer grid h/m with integer fine delays
/// D[l] * m, lets the regime change only every m fine steps and returns the
/// coarse samples x_n = y_{nm}. The coarse delays of `model` may therefore be
/// non-integer multiples of 1/m. With m = 1 this reproduces simulate().
SimulationResult simulateFineGrid(const SwitchingModel& model, int refinement,
                                  Index length, std::uint64_t seed,
                                  Index historyLength = 0);

}  // namespace cdnarms
