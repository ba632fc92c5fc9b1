#pragma once

#include <stdexcept>
#include <string>

namespace fokker {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input: out-of-range parameters, malformed scenario files.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class DomainError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Base for failures of the numerics on otherwise valid input.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class FoldOver : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Tangential lightcone contact; the 1/|f'| weight is meaningless there.
class GrazingRoot : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NoContraction : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NoShellReturn : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SpacelikeMomentum : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SingularA : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace fokker
