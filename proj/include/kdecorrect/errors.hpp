#pragma once

#include <stdexcept>
#include <string>

namespace kdecorrect {

// Bad input data: unreadable files, malformed CSV, invariant violations
// of user-supplied samples. CLI exit code 3.
class DataError : public std::runtime_error {
public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure: singular matrices, pilot underflow, non-finite
// objectives. CLI exit code 4.
class NumericError : public std::runtime_error {
public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Query so far outside the data that every kernel weight underflows.
class NoEvidenceError : public NumericError {
public:
  explicit NoEvidenceError(const std::string& what) : NumericError(what) {}
};

}  // namespace kdecorrect
