#pragma once

#include <stdexcept>
#include <string>

namespace ptpdelay
{

// Base of every error raised by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Invalid scenario / argument values. The CLI maps this to exit code 1.
class ConfigError : public Error
{
public:
    using Error::Error;
};

// A checked invariant did not hold at run time. The CLI maps this to exit code 2.
class InvariantViolation : public Error
{
public:
    using Error::Error;
};

// 64-bit time arithmetic left its representable range.
class OverflowError : public Error
{
public:
    using Error::Error;
};

// A sync cycle was used before all four timestamps were present.
class IncompleteCycle : public Error
{
public:
    using Error::Error;
};

// Measured RTD is smaller than the configured minimum one-way delays allow.
// Either d_min is wrong or the measurement is corrupted; bounds are never clamped.
class ConstraintViolation : public InvariantViolation
{
public:
    using InvariantViolation::InvariantViolation;
};

class DetectError : public Error
{
public:
    enum class Reason
    {
        insufficient_occurrences,
        motif_not_found,
        ambiguous,
        low_confidence,
    };

    DetectError(Reason reason, const std::string& what) : Error(what), reason_(reason) {}

    [[nodiscard]] Reason reason() const noexcept { return reason_; }

private:
    Reason reason_;
};

} // namespace ptpdelay
