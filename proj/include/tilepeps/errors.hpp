#pragma once

#include <stdexcept>
#include <string>

namespace tilepeps {

/// Malformed input or violated precondition.
class InvalidInput : public std::runtime_error {
 public:
  explicit InvalidInput(const std::string& what) : std::runtime_error(what) {}
};

/// An exact computation would exceed its configured size budget.
class BudgetExceeded : public std::runtime_error {
 public:
  explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace tilepeps
