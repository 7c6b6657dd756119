#pragma once

#include <stdexcept>
#include <string>

namespace fpt {

/// Base class for every numerical failure raised by the library.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument at a pole of the gamma function.
class PoleError : public NumericError {
public:
    using NumericError::NumericError;
};

/// Argument outside the domain an operation supports.
class DomainError : public NumericError {
public:
    using NumericError::NumericError;
};

/// Series, iteration or adaptive refinement ran out of budget.
class NoConvergence : public NumericError {
public:
    using NumericError::NumericError;
};

/// Root scan hit its ceiling before finding the requested number of zeros.
class BracketExhausted : public NumericError {
public:
    using NumericError::NumericError;
};

/// kappa == 0: the eigen-series does not exist for a potential-free particle.
class ZeroStiffness : public DomainError {
public:
    using DomainError::DomainError;
};

/// Physical parameters violate an invariant (r0 <= L, non-positive constants, ...).
class InvalidParams : public DomainError {
public:
    using DomainError::DomainError;
};

class CacheCorrupt : public NumericError {
public:
    using NumericError::NumericError;
};

class GridBeyondHorizon : public DomainError {
public:
    using DomainError::DomainError;
};

class OverflowGuard : public NumericError {
public:
    using NumericError::NumericError;
};

class GridTooCoarse : public NumericError {
public:
    using NumericError::NumericError;
};

class PrecisionExhausted : public NumericError {
public:
    using NumericError::NumericError;
};

}  // namespace fpt
