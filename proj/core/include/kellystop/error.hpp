#pragma once

#include <stdexcept>
#include <string>

namespace kellystop {

/// Raised when an argument lies outside the domain of an operation
/// (non-positive volatility, state below a stop level, unstable grid, ...).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical procedure produces non-finite values or hits a
/// singular configuration it cannot recover from.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised for requests a component recognises but does not support
/// (e.g. a value function for a strategy that has none in closed form).
class UnsupportedError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace kellystop
