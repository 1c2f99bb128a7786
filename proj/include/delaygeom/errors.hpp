#pragma once

#include <stdexcept>
#include <string>

namespace delaygeom
{

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error
{
  public:
    using std::domain_error::domain_error;
};

// A numerical procedure failed to reach its accuracy target (series cap,
// quadrature budget, alternating-sum instability). The message carries the
// partial diagnostics.
class NumericalError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

// Requested method is not valid for the coverage criterion.
class UnsupportedCriterion : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

// Raised when a cooperative cancellation token is observed.
class Cancelled : public std::runtime_error
{
  public:
    Cancelled() : std::runtime_error("computation cancelled") {}
};

} // namespace delaygeom
