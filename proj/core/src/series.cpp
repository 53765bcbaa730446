#include "cdnarms/series.hpp"

#include <sstream>

namespace cdnarms {

TimeSeries::TimeSeries(std::vector<double> history, std::vector<double> values,
                       Index origin)
    : TimeSeries(1, std::move(history), std::move(values), origin) {}

TimeSeries::TimeSeries(std::size_t dim, std::vector<double> history,
                       std::vector<double> values, Index origin)
    : dim_(dim), origin_(origin) {
  if (dim == 0) throw InvalidArgument("TimeSeries: dimension must be >= 1");
  if (history.size() % dim != 0 || values.size() % dim != 0) {
    throw InvalidArgument("TimeSeries: buffer length is not a multiple of the dimension");
  }
  if (values.empty()) throw InvalidArgument("TimeSeries: at least one sample is required");
  history_ = static_cast<Index>(history.size() / dim);
  data_ = std::move(history);
  data_.insert(data_.end(), values.begin(), values.end());
}

std::span<const double> TimeSeries::at(Index n) const {
  if (!contains(n)) {
    std::ostringstream msg;
    msg << "TimeSeries: index " << n << " outside [" << -history_ << ", "
        << lastIndex() << "]";
    throw IndexOutOfRange(msg.str());
  }
  return {data_.data() + static_cast<std::size_t>(n + history_) * dim_, dim_};
}

std::vector<double> TimeSeries::sampleValues() const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(sampleCount()));
  for (Index n = 0; n <= lastIndex(); ++n) out.push_back(at(n)[0]);
  return out;
}

std::vector<double> TimeSeries::historyValues() const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(history_));
  for (Index n = -history_; n < 0; ++n) out.push_back(at(n)[0]);
  return out;
}

void throwInterpolationRange(const TimeSeries& series, double tau) {
  std::ostringstream msg;
  msg.precision(17);
  msg << "interpolate: tau=" << tau << " needs samples outside ["
      << -series.historyLength() << ", " << series.lastIndex() << "]";
  throw IndexOutOfRange(msg.str());
}

std::vector<double> interpolate(const TimeSeries& series, double tau) {
  const double nearest = std::round(tau);
  if (std::abs(tau - nearest) < kIntegerIndexTolerance) {
    if (!series.contains(static_cast<Index>(nearest))) throwInterpolationRange(series, tau);
    const auto x = series.at(static_cast<Index>(nearest));
    return {x.begin(), x.end()};
  }
  const double lowerIndex = std::floor(tau);
  const auto lo = static_cast<Index>(lowerIndex);
  if (!series.contains(lo) || !series.contains(lo + 1)) throwInterpolationRange(series, tau);
  const auto x0 = series.at(lo);
  const auto x1 = series.at(lo + 1);
  const double w0 = lowerIndex + 1.0 - tau;
  const double w1 = tau - lowerIndex;
  std::vector<double> out(series.dim());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = w0 * x0[k] + w1 * x1[k];
  return out;
}

TimeSeries window(const TimeSeries& series, Index from, Index to) {
  if (from > to) throw InvalidArgument("window: empty or reversed range");
  if (!series.contains(from) || !series.contains(to)) {
    throw IndexOutOfRange("window: range exceeds the series");
  }
  const auto d = series.dim();
  const auto raw = series.raw();
  const auto split = static_cast<std::size_t>(from + series.historyLength()) * d;
  const auto end = static_cast<std::size_t>(to + series.historyLength() + 1) * d;
  return TimeSeries(d, std::vector<double>(raw.begin(), raw.begin() + split),
                    std::vector<double>(raw.begin() + split, raw.begin() + end),
                    series.origin() + from);
}

}  // namespace cdnarms
