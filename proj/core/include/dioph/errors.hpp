#pragma once

#include <stdexcept>
#include <string>

namespace dioph {

/// Input outside an operation's domain (bad point, bad ψ, malformed grammar).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The map's (d, m) shape does not fit the requested condition.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An evaluation would exceed its configured work budget.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dioph
