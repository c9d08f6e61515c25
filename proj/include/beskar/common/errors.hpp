#pragma once
#include <stdexcept>
#include <string>

namespace beskar {

// Raised when inputs violate a documented precondition (dimension mismatch,
// malformed public key, out-of-range configuration value).
class parameter_error : public std::invalid_argument
{
public:
  explicit parameter_error(const std::string& what)
    : std::invalid_argument(what)
  {
  }
};

// Fixed-point encoding would overflow the Z_{2^32} aggregate.
class encoding_error : public std::range_error
{
public:
  explicit encoding_error(const std::string& what)
    : std::range_error(what)
  {
  }
};

// A protocol step was invoked out of order or past its budget.
class protocol_error : public std::logic_error
{
public:
  explicit protocol_error(const std::string& what)
    : std::logic_error(what)
  {
  }
};

// Internal invariant failure that indicates misconfigured parameters, e.g.
// a signing loop that never terminates.
class configuration_error : public std::runtime_error
{
public:
  explicit configuration_error(const std::string& what)
    : std::runtime_error(what)
  {
  }
};

}
