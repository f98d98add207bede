#pragma once

#include <stdexcept>
#include <string>

namespace gasfc {

/// Parameter outside its admissible domain (sigma <= 0, q outside (0,1), ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input data does not satisfy a schema or length requirement.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical procedure failed (singular system, non-finite objective, ...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gasfc
