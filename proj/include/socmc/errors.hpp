#pragma once
#include <stdexcept>
#include <string>

namespace socmc {

// Error taxonomy maps onto CLI exit codes: config=2, data=3, numerical=4.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& m) : std::runtime_error(m) {}
};
struct DataError : std::runtime_error {
  explicit DataError(const std::string& m) : std::runtime_error(m) {}
};
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& m) : std::runtime_error(m) {}
};
// Programming errors (preconditions broken by calling code), not user input.
struct ContractViolation : std::logic_error {
  explicit ContractViolation(const std::string& m) : std::logic_error(m) {}
};

}  // namespace socmc
