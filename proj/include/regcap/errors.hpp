#pragma once

#include <stdexcept>
#include <string>

namespace regcap {

enum class ErrorCode {
    UnknownNodeId,
    WrongLayer,
    InvalidParameter,
    ModelMismatch,
    GridMismatch,
    GridTooSmall,
    EmptyTrajectory,
    TrajectoryTooShort,
    EmptyPathSet,
    InconsistentIds,
    MissingTrajectory,
    IoError,
    ParseError,
    ValidationFailed,
};

inline const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::UnknownNodeId: return "UnknownNodeId";
        case ErrorCode::WrongLayer: return "WrongLayer";
        case ErrorCode::InvalidParameter: return "InvalidParameter";
        case ErrorCode::ModelMismatch: return "ModelMismatch";
        case ErrorCode::GridMismatch: return "GridMismatch";
        case ErrorCode::GridTooSmall: return "GridTooSmall";
        case ErrorCode::EmptyTrajectory: return "EmptyTrajectory";
        case ErrorCode::TrajectoryTooShort: return "TrajectoryTooShort";
        case ErrorCode::EmptyPathSet: return "EmptyPathSet";
        case ErrorCode::InconsistentIds: return "InconsistentIds";
        case ErrorCode::MissingTrajectory: return "MissingTrajectory";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::ValidationFailed: return "ValidationFailed";
    }
    return "UnknownError";
}

/// Typed failure with a stable machine-readable code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace regcap
