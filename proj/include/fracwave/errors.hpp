#pragma once

#include <stdexcept>
#include <string>

namespace fracwave {

/// Precondition violation on an argument (bad grid size, negative order, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input that is well-formed but internally inconsistent, e.g. a spectrum
/// that is not the transform of a real field.
class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// NaN or Inf produced while evaluating the right-hand side.
class NumericalOverflow : public std::runtime_error {
 public:
  NumericalOverflow(const std::string& what, double time)
      : std::runtime_error(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// Kernel evaluated on its singular set (p = 0, q = 0 or p + q = 0).
class SingularPoint : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Problem size beyond what an O(N^2) routine is willing to handle.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

}  // namespace fracwave
