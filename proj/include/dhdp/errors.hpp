#pragma once

#include <stdexcept>
#include <string>

namespace dhdp {

// Bad input data or files. The CLI maps this to exit code 1.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Violated operation contract (double seat, inconsistent counts, ...).
class ContractViolation : public std::logic_error {
 public:
  explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

}  // namespace dhdp
