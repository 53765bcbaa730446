#pragma once

#include <stdexcept>
#include <string>

namespace cdnarms {

/// A series index (or the neighbour pair an interpolation needs) is missing.
class IndexOutOfRange : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// A model, configuration or argument violates its documented invariants.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Every restart of a fit ended with a non-finite likelihood.
class FitFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cdnarms
