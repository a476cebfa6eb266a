#pragma once

#include <stdexcept>
#include <string>

namespace vfbd {

/// Base for failures of a numerical procedure (non-convergence, singular systems).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain where a correlation is defined.
class DomainError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Zero holdup or zero solid feed where a ratio needs them.
class DegenerateFeedError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class SingularMatrixError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class ConvergenceError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace vfbd
