#include <aspl/error.hpp>

namespace aspl {

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DuplicateConsecutivePoints: return "DuplicateConsecutivePoints";
    case ErrorCode::TopologyError: return "TopologyError";
    case ErrorCode::ParameterOutOfRange: return "ParameterOutOfRange";
    case ErrorCode::DegenerateShape: return "DegenerateShape";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::EigenFailure: return "EigenFailure";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::KernelTooLarge: return "KernelTooLarge";
    case ErrorCode::Divergence: return "Divergence";
    case ErrorCode::TooManyLevels: return "TooManyLevels";
    case ErrorCode::ScheduleMismatch: return "ScheduleMismatch";
    case ErrorCode::OpenContour: return "OpenContour";
    case ErrorCode::NoActions: return "NoActions";
    case ErrorCode::ZeroEffort: return "ZeroEffort";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

ErrorClass classify(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::SingularSystem:
    case ErrorCode::NonConvergence:
    case ErrorCode::EigenFailure:
    case ErrorCode::Divergence:
    case ErrorCode::DegenerateShape:
        return ErrorClass::Numerical;
    case ErrorCode::ScheduleMismatch:
    case ErrorCode::TooManyLevels:
        return ErrorClass::Schedule;
    default:
        return ErrorClass::Input;
    }
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

} // namespace aspl
