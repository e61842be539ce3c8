#pragma once

#include <stdexcept>
#include <string>

namespace scp {

// Error codes shared between the C++ core and the C API surface.
// Keep in sync with scp_status in include/scp/scp.h.
enum class ErrorCode {
    Ok = 0,
    InvalidArgument,
    ParseError,
    InvariantViolation,
    LengthMismatch,
    DegenerateInput,
    BadEpsilon,
    BadTau,
    UnknownLabel,
    MissingGold,
    EmptyInput,
    AlreadyFilled,
    MissingHierarchy,
    SequenceTooLong,
    MaskNotFound,
    MultipleMasks,
    UnknownVerbalizerToken,
    DimensionTooSmall,
    InsufficientExamples,
    ColumnMismatch,
    TooFewPoints,
    BadPerplexity,
    VersionMismatch,
    CorruptFile,
    IoError,
    Internal,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

inline void require(bool ok, ErrorCode code, const std::string& message) {
    if (!ok) fail(code, message);
}

}  // namespace scp
