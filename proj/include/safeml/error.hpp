#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace safeml {

enum class ErrorCode {
    invalid_argument,
    empty_file,
    missing_target,
    missing_value,
    unparseable_cell,
    schema_mismatch,
    degenerate_split,
    degenerate_data,
    oracle_failure,
    non_finite_output,
    launch_failure,
    protocol_violation,
    empty_column,
    non_finite_input,
    unknown_level,
    schema_version_mismatch,
    malformed_file,
    rank_deficient,
    single_class,
};

constexpr std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::empty_file: return "EmptyFile";
    case ErrorCode::missing_target: return "MissingTarget";
    case ErrorCode::missing_value: return "MissingValue";
    case ErrorCode::unparseable_cell: return "UnparseableCell";
    case ErrorCode::schema_mismatch: return "SchemaMismatch";
    case ErrorCode::degenerate_split: return "DegenerateSplit";
    case ErrorCode::degenerate_data: return "DegenerateData";
    case ErrorCode::oracle_failure: return "OracleFailure";
    case ErrorCode::non_finite_output: return "NonFiniteOutput";
    case ErrorCode::launch_failure: return "LaunchFailure";
    case ErrorCode::protocol_violation: return "ProtocolViolation";
    case ErrorCode::empty_column: return "EmptyColumn";
    case ErrorCode::non_finite_input: return "NonFiniteInput";
    case ErrorCode::unknown_level: return "UnknownLevel";
    case ErrorCode::schema_version_mismatch: return "SchemaVersionMismatch";
    case ErrorCode::malformed_file: return "MalformedFile";
    case ErrorCode::rank_deficient: return "RankDeficient";
    case ErrorCode::single_class: return "SingleClass";
    }
    return "Unknown";
}

/// Every failure raised by the library. The code identifies the contract that
/// was violated; the message carries the offending location.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), message_(message)
    {
    }

    ErrorCode code() const noexcept { return code_; }
    /// The message without the code prefix.
    const std::string& message() const noexcept { return message_; }

private:
    ErrorCode code_;
    std::string message_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

} // namespace safeml
