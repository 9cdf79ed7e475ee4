#pragma once

#include <stdexcept>
#include <string>

namespace clews {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent file contents (bad magic, truncation, ...).
class FormatError : public Error {
 public:
  using Error::Error;
};

// Structurally valid input carrying unusable data (non-finite values,
// missing tracks, empty stores).
class DataError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Out-of-range or inconsistent parameter values.
class ParamError : public Error {
 public:
  using Error::Error;
};

// Dimension or shape mismatch between operands.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// A reduction was asked to collapse a matrix with no valid cells.
class EmptyReductionError : public Error {
 public:
  using Error::Error;
};

// A loss batch without at least one positive and one negative pair.
class DegenerateBatchError : public Error {
 public:
  using Error::Error;
};

class SamplingError : public Error {
 public:
  using Error::Error;
};

// A computation left the representable/finite range.
class NumericalRangeError : public Error {
 public:
  using Error::Error;
};

// Metric undefined for the given query (no matches, or only matches).
class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

}  // namespace clews
