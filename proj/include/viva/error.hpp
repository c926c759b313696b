#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

namespace viva {

enum class ErrorCode {
    UnknownDataset,
    UnknownAttribute,
    UnknownLevel,
    EmptyResult,
    NameCollision,
    NotChartable,
    WrongKind,
    TooManyLevels,
    InvalidParams,
    InconsistentLog,
    UnknownSeq,
    DependencyViolation,
    EmptyLog,
    NoData,
    InvalidCombination,
    CrossDataset,
    WrongArity,
    InvalidRange,
    MalformedCsv,
    MissingColumn,
    NoTimeAttribute,
    IoError,
    DuplicateName,
    ProtectedConcern,
    UnknownConcern,
    UnknownMember,
    InvalidSpec,
    BadRequest,
};

inline std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::UnknownDataset: return "UnknownDataset";
    case ErrorCode::UnknownAttribute: return "UnknownAttribute";
    case ErrorCode::UnknownLevel: return "UnknownLevel";
    case ErrorCode::EmptyResult: return "EmptyResult";
    case ErrorCode::NameCollision: return "NameCollision";
    case ErrorCode::NotChartable: return "NotChartable";
    case ErrorCode::WrongKind: return "WrongKind";
    case ErrorCode::TooManyLevels: return "TooManyLevels";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::InconsistentLog: return "InconsistentLog";
    case ErrorCode::UnknownSeq: return "UnknownSeq";
    case ErrorCode::DependencyViolation: return "DependencyViolation";
    case ErrorCode::EmptyLog: return "EmptyLog";
    case ErrorCode::NoData: return "NoData";
    case ErrorCode::InvalidCombination: return "InvalidCombination";
    case ErrorCode::CrossDataset: return "CrossDataset";
    case ErrorCode::WrongArity: return "WrongArity";
    case ErrorCode::InvalidRange: return "InvalidRange";
    case ErrorCode::MalformedCsv: return "MalformedCsv";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::NoTimeAttribute: return "NoTimeAttribute";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::DuplicateName: return "DuplicateName";
    case ErrorCode::ProtectedConcern: return "ProtectedConcern";
    case ErrorCode::UnknownConcern: return "UnknownConcern";
    case ErrorCode::UnknownMember: return "UnknownMember";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::BadRequest: return "BadRequest";
    }
    return "Unknown";
}

/// Every failure surfaced by the library. `details` carries structured context
/// (offending seq, dependent closure, diagnostics) and is forwarded verbatim
/// in HTTP error bodies.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, nlohmann::json details = nlohmann::json::object())
        : std::runtime_error(message), code_(code), details_(std::move(details)) {}

    ErrorCode code() const noexcept { return code_; }
    const nlohmann::json& details() const noexcept { return details_; }

private:
    ErrorCode code_;
    nlohmann::json details_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message,
                              nlohmann::json details = nlohmann::json::object()) {
    throw Error(code, message, std::move(details));
}

} // namespace viva
