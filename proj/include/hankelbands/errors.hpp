#pragma once

#include <stdexcept>
#include <string>

namespace hankelbands {

// Base class so callers can catch everything thrown by the library in one place.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input lies on or too close to a singular set (Gamma poles, lattice points).
class DomainError : public Error {
public:
    using Error::Error;
};

// Malformed arguments: sizes, ranges, non-Hermitian input and so on.
class ArgumentError : public Error {
public:
    using Error::Error;
};

// A numerical tolerance could not be met.
class NumericalError : public Error {
public:
    using Error::Error;
};

class TrackingError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class BracketError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// Configuration and file-format problems.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace hankelbands
