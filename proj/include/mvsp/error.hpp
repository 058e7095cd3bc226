#pragma once

#include <stdexcept>
#include <string>

namespace mvsp {

// Invalid arguments are reported with std::invalid_argument throughout.

/// A request exceeds a configured memory/qubit limit.
class ResourceLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A computation produced or received a non-finite or otherwise unusable value.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Post-selection onto the all-zero ancilla pattern has (numerically) zero
/// probability.
class DegeneratePostselectionError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// Installs a sink for non-fatal warnings. The default writes to std::cerr.
using WarningSink = void (*)(const std::string&);
void set_warning_sink(WarningSink sink);
void warn(const std::string& message);

}  // namespace mvsp
