#ifndef XILAB_ERROR_HPP
#define XILAB_ERROR_HPP

#include <stdexcept>
#include <string>

namespace xilab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed arguments: wrong lengths, non-finite values, out-of-range parameters.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Ties among x values under TiePolicy::Reject.
class TieError : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

/// A CDF that is not monotone or leaves [0, 1].
class InvalidCdf : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

/// Experiment configuration or input-file problems.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Quadrature non-convergence and other numeric failures.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace xilab

#endif  // XILAB_ERROR_HPP
