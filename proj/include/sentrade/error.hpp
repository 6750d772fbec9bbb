#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sentrade {

enum class ErrorCode {
    // ingest
    MissingColumn,
    NonPositivePrice,
    DuplicateDate,
    GapInCalendar,
    ExtremeReturn,
    MalformedRow,
    MalformedLine,
    EmptyText,
    FileNotFound,
    // tweetprep
    NoTokens,
    TweetAfterLastTradingDay,
    InvalidLexicon,
    // synth
    InvalidParams,
    OutOfRange,
    // features
    InsufficientHistory,
    AlignmentMismatch,
    // classify
    SingleClassTraining,
    NoConvergence,
    FeatureMismatch,
    TooFewRows,
    TooFewFeatures,
    EmptyTest,
    // qlearn
    DimensionMismatch,
    // backtest
    DateRangeMismatch,
};

std::string_view to_string(ErrorCode code);

/// Every recoverable failure in the library is raised as an Error carrying a
/// machine-checkable code; the message names the offending row or line.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace sentrade
