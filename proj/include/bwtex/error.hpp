#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bwtex {

enum class ErrorCode {
    InvalidSpec,
    UnknownGlyph,
    MismatchedDataset,
    EmptyPie,
    MissingRegions,
    OutOfRange,
    BadItemCount,
    TooFewSamples,
    UnpairedParticipant,
    EmptyAfterExclusion,
    DuplicateRankFirst,
    UnknownCategory,
    InvalidProperty,
    InvalidAction,
    SessionNotFound,
    ParseError,
    RenderFailure,
    IoError,
};

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidSpec: return "INVALID_SPEC";
    case ErrorCode::UnknownGlyph: return "UNKNOWN_GLYPH";
    case ErrorCode::MismatchedDataset: return "MISMATCHED_DATASET";
    case ErrorCode::EmptyPie: return "EMPTY_PIE";
    case ErrorCode::MissingRegions: return "MISSING_REGIONS";
    case ErrorCode::OutOfRange: return "OUT_OF_RANGE";
    case ErrorCode::BadItemCount: return "BAD_ITEM_COUNT";
    case ErrorCode::TooFewSamples: return "TOO_FEW_SAMPLES";
    case ErrorCode::UnpairedParticipant: return "UNPAIRED_PARTICIPANT";
    case ErrorCode::EmptyAfterExclusion: return "EMPTY_AFTER_EXCLUSION";
    case ErrorCode::DuplicateRankFirst: return "DUPLICATE_RANK_FIRST";
    case ErrorCode::UnknownCategory: return "UNKNOWN_CATEGORY";
    case ErrorCode::InvalidProperty: return "INVALID_PROPERTY";
    case ErrorCode::InvalidAction: return "INVALID_ACTION";
    case ErrorCode::SessionNotFound: return "SESSION_NOT_FOUND";
    case ErrorCode::ParseError: return "PARSE_ERROR";
    case ErrorCode::RenderFailure: return "RENDER_FAILURE";
    case ErrorCode::IoError: return "IO_ERROR";
    }
    return "UNKNOWN";
}

/// Every failure raised by the library carries a machine-readable code.
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

} // namespace bwtex
