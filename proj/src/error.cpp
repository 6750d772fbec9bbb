#include "sentrade/error.hpp"

namespace sentrade {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::MissingColumn: return "MissingColumn";
        case ErrorCode::NonPositivePrice: return "NonPositivePrice";
        case ErrorCode::DuplicateDate: return "DuplicateDate";
        case ErrorCode::GapInCalendar: return "GapInCalendar";
        case ErrorCode::ExtremeReturn: return "ExtremeReturn";
        case ErrorCode::MalformedRow: return "MalformedRow";
        case ErrorCode::MalformedLine: return "MalformedLine";
        case ErrorCode::EmptyText: return "EmptyText";
        case ErrorCode::FileNotFound: return "FileNotFound";
        case ErrorCode::NoTokens: return "NoTokens";
        case ErrorCode::TweetAfterLastTradingDay: return "TweetAfterLastTradingDay";
        case ErrorCode::InvalidLexicon: return "InvalidLexicon";
        case ErrorCode::InvalidParams: return "InvalidParams";
        case ErrorCode::OutOfRange: return "OutOfRange";
        case ErrorCode::InsufficientHistory: return "InsufficientHistory";
        case ErrorCode::AlignmentMismatch: return "AlignmentMismatch";
        case ErrorCode::SingleClassTraining: return "SingleClassTraining";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::FeatureMismatch: return "FeatureMismatch";
        case ErrorCode::TooFewRows: return "TooFewRows";
        case ErrorCode::TooFewFeatures: return "TooFewFeatures";
        case ErrorCode::EmptyTest: return "EmptyTest";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::DateRangeMismatch: return "DateRangeMismatch";
    }
    return "Unknown";
}

}  // namespace sentrade
