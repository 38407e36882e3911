#pragma once

#include <stdexcept>
#include <string>

namespace icefloe {

// Base for everything thrown by the library. Two informal families:
// data/contract errors (bad inputs, malformed files) and numerical
// failures (state blew up, decomposition failed). The CLI maps the
// former to exit code 2 and the latter to exit code 3.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DataError : Error {
    using Error::Error;
};
struct NumericalError : Error {
    using Error::Error;
};

// -- data / contract ---------------------------------------------------
struct DimensionMismatch : DataError { using DataError::DataError; };
struct IndexOutOfRange : DataError { using DataError::DataError; };
struct EmptyTarget : DataError { using DataError::DataError; };
struct DataTooShort : DataError { using DataError::DataError; };
struct LengthMismatch : DataError { using DataError::DataError; };
struct EmptyInput : DataError { using DataError::DataError; };
struct DegenerateSeries : DataError { using DataError::DataError; };
struct Misaligned : DataError { using DataError::DataError; };
struct RangeOutOfBounds : DataError { using DataError::DataError; };
struct InvalidConfig : DataError { using DataError::DataError; };
struct IoError : DataError { using DataError::DataError; };

// -- numerical ----------------------------------------------------------
struct OrderingViolation : NumericalError {
    long step_index;
    explicit OrderingViolation(long step, const std::string& what)
        : NumericalError(what), step_index(step) {}
};
struct PackingFailure : NumericalError { using NumericalError::NumericalError; };
struct NonFiniteLoss : NumericalError {
    long batch_index;
    explicit NonFiniteLoss(long batch, const std::string& what)
        : NumericalError(what), batch_index(batch) {}
};
struct NonFiniteState : NumericalError {
    long step_index;
    explicit NonFiniteState(long step, const std::string& what)
        : NumericalError(what), step_index(step) {}
};
struct NonFiniteMember : NumericalError {
    long step_index;
    int member;
    NonFiniteMember(long step, int m, const std::string& what)
        : NumericalError(what), step_index(step), member(m) {}
};
struct SingularInnovationCovariance : NumericalError { using NumericalError::NumericalError; };
struct DecompositionFailure : NumericalError { using NumericalError::NumericalError; };

}  // namespace icefloe
