#pragma once

#include <stdexcept>
#include <string>

namespace btcusp {

/// Root of all library exceptions. The CLI maps the subclasses onto exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Something needed more known digits than were available.
class PrecisionError : public Error {
public:
    using Error::Error;
};

class IndeterminateValuation : public PrecisionError {
public:
    using PrecisionError::PrecisionError;
};

class InsufficientPrecision : public PrecisionError {
public:
    InsufficientPrecision(const std::string& what, int needed)
        : PrecisionError(what + " (need precision " + std::to_string(needed) + ")"), needed_(needed) {}

    /// Absolute precision that would have been sufficient.
    int needed() const noexcept { return needed_; }

private:
    int needed_;
};

class EndPrecisionExhausted : public PrecisionError {
public:
    using PrecisionError::PrecisionError;
};

/// Malformed literals, violated preconditions, division by zero.
class InvalidInput : public Error {
public:
    using Error::Error;
};

class DivisionByZero : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

class EqualEnds : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

class DoesNotFixEnd : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

class NotOnAxis : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

class SizeGuard : public Error {
public:
    using Error::Error;
};

class UncertifiedTail : public Error {
public:
    using Error::Error;
};

}  // namespace btcusp
