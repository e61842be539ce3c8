#include "core/error.hpp"

namespace scp {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::Ok: return "Ok";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::InvariantViolation: return "InvariantViolation";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::DegenerateInput: return "DegenerateInput";
        case ErrorCode::BadEpsilon: return "BadEpsilon";
        case ErrorCode::BadTau: return "BadTau";
        case ErrorCode::UnknownLabel: return "UnknownLabel";
        case ErrorCode::MissingGold: return "MissingGold";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::AlreadyFilled: return "AlreadyFilled";
        case ErrorCode::MissingHierarchy: return "MissingHierarchy";
        case ErrorCode::SequenceTooLong: return "SequenceTooLong";
        case ErrorCode::MaskNotFound: return "MaskNotFound";
        case ErrorCode::MultipleMasks: return "MultipleMasks";
        case ErrorCode::UnknownVerbalizerToken: return "UnknownVerbalizerToken";
        case ErrorCode::DimensionTooSmall: return "DimensionTooSmall";
        case ErrorCode::InsufficientExamples: return "InsufficientExamples";
        case ErrorCode::ColumnMismatch: return "ColumnMismatch";
        case ErrorCode::TooFewPoints: return "TooFewPoints";
        case ErrorCode::BadPerplexity: return "BadPerplexity";
        case ErrorCode::VersionMismatch: return "VersionMismatch";
        case ErrorCode::CorruptFile: return "CorruptFile";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::Internal: return "Internal";
    }
    return "Unknown";
}

}  // namespace scp
