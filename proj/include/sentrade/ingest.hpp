#pragma once

#include "sentrade/date.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace sentrade {

/// One trading day of a symbol with its sector-ETF close carried alongside.
struct PriceBar {
    Date date;
    double close = 0.0;
    double volume = 0.0;
    double etf_close = 0.0;

    bool operator==(const PriceBar&) const = default;
};

enum class SourceTag { Ticker, Product };

std::string_view to_string(SourceTag tag);
SourceTag parse_source_tag(std::string_view s);

struct TweetRecord {
    Timestamp timestamp;
    std::string text;
    SourceTag source_tag = SourceTag::Product;
};

/// Absolute daily log return (stock or ETF) at or above this is rejected as
/// ExtremeReturn, which keeps every one-unit strategy return above -100%.
inline constexpr double kMaxAbsLogReturn = 0.5;

/// Parses a prices CSV with header exactly `date,close,volume,etf_close`.
///
/// Rows may arrive in any order; the result is sorted by date. The sorted
/// series must have no duplicate dates, consist of weekdays only and skip no
/// weekday between its first and last bar. Errors name the 1-based data row.
std::vector<PriceBar> parse_prices(std::string_view csv);
std::vector<PriceBar> load_prices(const std::filesystem::path& path);
std::string format_prices(const std::vector<PriceBar>& bars);

/// Parses JSON-lines tweets (`ts`, `text`); blank lines are skipped.
std::vector<TweetRecord> parse_tweets(std::string_view jsonl, SourceTag tag);
std::vector<TweetRecord> load_tweets(const std::filesystem::path& path, SourceTag tag);
std::string format_tweets(const std::vector<TweetRecord>& tweets);

}  // namespace sentrade
