#pragma once

#include <stdexcept>

namespace mdke {

/// Malformed input data: bad records, dimension mismatches, duplicate ids,
/// non-normalized histograms, missing files.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A computation produced non-finite values or a factorization failed; usually
/// a sign of badly chosen bandwidths or a numerically non-PSD Gram.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mdke
