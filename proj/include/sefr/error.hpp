#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sefr {

enum class ErrorCode {
    MissingClass,
    NegativeFeature,
    InvalidValue,
    DimensionMismatch,
    OutOfRange,
    LengthMismatch,
    EmptyMatrix,
    BadK,
    ParseError,
    RaggedRows,
    EmptyFile,
    VersionMismatch,
    SchemaError,
    GridOutOfBounds,
    ShapeMismatch,
    ModelTooLarge,
    InvalidArgument,
    IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Domain error raised by every sefr operation. The code is stable and is
/// what callers (and the CLI exit-code mapping) should branch on.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace sefr
