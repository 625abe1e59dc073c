#pragma once

#include <stdexcept>
#include <string>

namespace aspl {

enum class ErrorCode {
    InvalidArgument,
    DuplicateConsecutivePoints,
    TopologyError,
    ParameterOutOfRange,
    DegenerateShape,
    SingularSystem,
    NonConvergence,
    InsufficientData,
    EigenFailure,
    DimensionMismatch,
    KernelTooLarge,
    Divergence,
    TooManyLevels,
    ScheduleMismatch,
    OpenContour,
    NoActions,
    ZeroEffort,
    ParseError,
    IoError,
};

/// Coarse failure class, used for CLI exit codes and HTTP status mapping.
enum class ErrorClass { Input, Numerical, Schedule };

const char* to_string(ErrorCode code) noexcept;
ErrorClass classify(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace aspl
