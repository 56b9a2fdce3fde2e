#pragma once

#include <stdexcept>
#include <string>

namespace plkg {

// Base for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid scalar parameter (variance, rate, weight out of range).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Dimension or shape disagreement between operands.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// A documented precondition on an argument value was violated (e.g. non-unit beam).
class ContractError : public Error {
 public:
  using Error::Error;
};

// A rate formula's log argument left its domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Matrix with no usable dominant direction.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

// Malformed or out-of-range configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Training produced a non-finite loss.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace plkg
