#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cdnarms/error.hpp"

namespace cdnarms {

using Index = std::ptrdiff_t;

/// Fractional indices closer than this to an integer are read as that integer.
inline constexpr double kIntegerIndexTolerance = 1e-9;

/// A real-valued series x_{-H}, ..., x_{-1}, x_0, ..., x_T of d-dimensional
/// states. Index 0 is the first likelihood-bearing sample; negative indices
/// address the pre-sample history. History and samples share one contiguous
/// buffer so a delayed read is a single offset computation.
///
/// `origin` is the absolute time index of sample 0. It is only consumed by
/// dynamics with an explicit time dependence (the forcing term of the Ghil
/// layer) and lets a window keep the phase of its parent series.
class TimeSeries {
 public:
  TimeSeries() = default;

  /// Scalar series.
  TimeSeries(std::vector<double> history, std::vector<double> values,
             Index origin = 0);

  /// d-dimensional series; `history` and `values` hold states back to back.
  TimeSeries(std::size_t dim, std::vector<double> history,
             std::vector<double> values, Index origin = 0);

  std::size_t dim() const noexcept { return dim_; }
  Index historyLength() const noexcept { return history_; }
  /// T, the index of the last sample.
  Index lastIndex() const noexcept {
    return static_cast<Index>(data_.size() / dim_) - history_ - 1;
  }
  /// T + 1.
  Index sampleCount() const noexcept { return lastIndex() + 1; }
  Index origin() const noexcept { return origin_; }
  bool empty() const noexcept { return data_.empty(); }

  bool contains(Index n) const noexcept {
    return n >= -history_ && n <= lastIndex();
  }

  /// State at integer index n; throws IndexOutOfRange outside [-H, T].
  std::span<const double> at(Index n) const;

  /// Scalar access without bounds checks; requires dim() == 1.
  double operator[](Index n) const noexcept {
    return data_[static_cast<std::size_t>(n + history_)];
  }

  /// Component 0 of every sample x_0..x_T.
  std::vector<double> sampleValues() const;
  std::vector<double> historyValues() const;

  /// Flattened states, history first.
  std::span<const double> raw() const noexcept { return data_; }

 private:
  friend class SeriesWriter;

  std::vector<double> data_;
  std::size_t dim_ = 1;
  Index history_ = 0;
  Index origin_ = 0;
};

/// Write access for generators that fill a series sample by sample.
class SeriesWriter {
 public:
  explicit SeriesWriter(TimeSeries& series) : series_(series) {}
  std::span<double> at(Index n) {
    return {series_.data_.data() + static_cast<std::size_t>(n + series_.history_) * series_.dim_,
            series_.dim_};
  }

 private:
  TimeSeries& series_;
};

[[noreturn]] void throwInterpolationRange(const TimeSeries& series, double tau);

/// Order-1 interpolation x~_tau of a scalar series. Integer tau (within
/// kIntegerIndexTolerance) returns the stored sample exactly.
inline double interpolateScalar(const TimeSeries& series, double tau) {
  const double nearest = std::round(tau);
  if (std::abs(tau - nearest) < kIntegerIndexTolerance) {
    const auto n = static_cast<Index>(nearest);
    if (!series.contains(n)) throwInterpolationRange(series, tau);
    return series[n];
  }
  const double lowerIndex = std::floor(tau);
  const auto lo = static_cast<Index>(lowerIndex);
  if (!series.contains(lo) || !series.contains(lo + 1)) {
    throwInterpolationRange(series, tau);
  }
  return (lowerIndex + 1.0 - tau) * series[lo] +
         (tau - lowerIndex) * series[lo + 1];
}

/// Order-1 interpolation for a series of any dimension.
std::vector<double> interpolate(const TimeSeries& series, double tau);

/// Sub-series covering [from, to]; index 0 of the result is `from` and every
/// earlier sample of `series` becomes history.
TimeSeries window(const TimeSeries& series, Index from, Index to);

}  // namespace cdnarms
