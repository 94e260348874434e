#pragma once

#include <stdexcept>
#include <string>

namespace riskflow {

// Base for every error raised by the library. Each subsystem throws a
// dedicated subclass so callers can map failures onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidGrid : public Error { using Error::Error; };
class InvalidParameter : public Error { using Error::Error; };
class InvalidCost : public Error { using Error::Error; };
class AssemblyError : public Error { using Error::Error; };
class PropagationError : public Error { using Error::Error; };
class ConfigError : public Error { using Error::Error; };
class IoError : public Error { using Error::Error; };
class PolicySpaceTooLarge : public Error { using Error::Error; };

}  // namespace riskflow
