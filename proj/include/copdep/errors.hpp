#ifndef COPDEP_ERRORS_HPP
#define COPDEP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace copdep {

/// Invalid family parameters or a supplied function that breaks the
/// defining constraints (convexity, bounds, monotonicity).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A function was evaluated outside the set where it is positive.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An operation was called on an object that does not satisfy its
/// hypotheses (e.g. a jump witness for a Pickands function without jumps).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A constructive witness search exhausted its budget.
class SearchFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace copdep

#endif  // COPDEP_ERRORS_HPP
