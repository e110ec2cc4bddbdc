#include "sefr/error.hpp"

namespace sefr {

std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::MissingClass: return "MissingClass";
    case ErrorCode::NegativeFeature: return "NegativeFeature";
    case ErrorCode::InvalidValue: return "InvalidValue";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::EmptyMatrix: return "EmptyMatrix";
    case ErrorCode::BadK: return "BadK";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::RaggedRows: return "RaggedRows";
    case ErrorCode::EmptyFile: return "EmptyFile";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::GridOutOfBounds: return "GridOutOfBounds";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::ModelTooLarge: return "ModelTooLarge";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code)
{
}

} // namespace sefr
