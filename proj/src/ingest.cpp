#include "sentrade/ingest.hpp"
#include "sentrade/error.hpp"
#include "sentrade/text_io.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>
#include <json.hpp>

namespace sentrade {

std::string_view to_string(SourceTag tag) {
    return tag == SourceTag::Ticker ? "ticker" : "product";
}

SourceTag parse_source_tag(std::string_view s) {
    if (s == "ticker") return SourceTag::Ticker;
    if (s == "product") return SourceTag::Product;
    throw std::invalid_argument("unknown tweet set '" + std::string(s) + "'");
}

namespace {

struct RawBar {
    PriceBar bar;
    std::size_t row;
};

double require_number(std::string_view field, std::string_view name, std::size_t row) {
    auto v = io::parse_double(field);
    if (!v) {
        throw Error(ErrorCode::MalformedRow,
                    fmt::format("row {}: cannot parse {} '{}'", row, name, field));
    }
    return *v;
}

}  // namespace

std::vector<PriceBar> parse_prices(std::string_view csv) {
    const auto all_lines = io::lines(csv);
    if (all_lines.empty()) throw Error(ErrorCode::MissingColumn, "empty file, header missing");

    const auto header = io::split(all_lines.front(), ',');
    static constexpr std::string_view kColumns[] = {"date", "close", "volume", "etf_close"};
    for (std::size_t i = 0; i < std::size(kColumns); ++i) {
        if (i >= header.size() || io::trim(header[i]) != kColumns[i]) {
            throw Error(ErrorCode::MissingColumn,
                        fmt::format("header must be date,close,volume,etf_close; column '{}' missing",
                                    kColumns[i]));
        }
    }
    if (header.size() != std::size(kColumns)) {
        throw Error(ErrorCode::MissingColumn, "unexpected extra header columns");
    }

    std::vector<RawBar> raw;
    std::size_t row = 0;
    for (std::size_t li = 1; li < all_lines.size(); ++li) {
        if (io::trim(all_lines[li]).empty()) continue;
        ++row;
        const auto fields = io::split(all_lines[li], ',');
        if (fields.size() != 4) {
            throw Error(ErrorCode::MissingColumn,
                        fmt::format("row {}: expected 4 fields, got {}", row, fields.size()));
        }
        auto date = Date::parse(io::trim(fields[0]));
        if (!date) {
            throw Error(ErrorCode::MalformedRow,
                        fmt::format("row {}: bad date '{}'", row, fields[0]));
        }
        PriceBar bar{*date, require_number(fields[1], "close", row),
                     require_number(fields[2], "volume", row),
                     require_number(fields[3], "etf_close", row)};
        if (bar.close <= 0.0 || bar.etf_close <= 0.0) {
            throw Error(ErrorCode::NonPositivePrice, fmt::format("row {}: price must be > 0", row));
        }
        if (bar.volume < 0.0) {
            throw Error(ErrorCode::MalformedRow, fmt::format("row {}: negative volume", row));
        }
        raw.push_back({bar, row});
    }

    std::stable_sort(raw.begin(), raw.end(),
                     [](const RawBar& a, const RawBar& b) { return a.bar.date < b.bar.date; });

    std::vector<PriceBar> bars;
    bars.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const auto& cur = raw[i];
        if (!cur.bar.date.is_weekday()) {
            throw Error(ErrorCode::GapInCalendar,
                        fmt::format("row {}: {} is not a trading day", cur.row,
                                    cur.bar.date.to_string()));
        }
        if (i > 0) {
            const auto& prev = raw[i - 1];
            if (cur.bar.date == prev.bar.date) {
                throw Error(ErrorCode::DuplicateDate,
                            fmt::format("row {}: date {} already seen at row {}", cur.row,
                                        cur.bar.date.to_string(), prev.row));
            }
            if (cur.bar.date != prev.bar.date.next_weekday()) {
                throw Error(ErrorCode::GapInCalendar,
                            fmt::format("row {}: missing trading day(s) between {} and {}", cur.row,
                                        prev.bar.date.to_string(), cur.bar.date.to_string()));
            }
            const double r = std::log(cur.bar.close / prev.bar.close);
            const double m = std::log(cur.bar.etf_close / prev.bar.etf_close);
            if (std::abs(r) >= kMaxAbsLogReturn || std::abs(m) >= kMaxAbsLogReturn) {
                throw Error(ErrorCode::ExtremeReturn,
                            fmt::format("row {}: daily log return beyond +/-{}", cur.row,
                                        kMaxAbsLogReturn));
            }
        }
        bars.push_back(cur.bar);
    }
    return bars;
}

std::vector<PriceBar> load_prices(const std::filesystem::path& path) {
    return parse_prices(io::read_file(path));
}

std::string format_prices(const std::vector<PriceBar>& bars) {
    std::string out = "date,close,volume,etf_close\n";
    for (const auto& b : bars) {
        out += fmt::format("{},{},{},{}\n", b.date.to_string(), io::format_double(b.close),
                           io::format_double(b.volume), io::format_double(b.etf_close));
    }
    return out;
}

std::vector<TweetRecord> parse_tweets(std::string_view jsonl, SourceTag tag) {
    std::vector<TweetRecord> out;
    const auto all_lines = io::lines(jsonl);
    for (std::size_t i = 0; i < all_lines.size(); ++i) {
        const std::size_t line_no = i + 1;
        if (io::trim(all_lines[i]).empty()) continue;

        nlohmann::json j = nlohmann::json::parse(all_lines[i], nullptr, /*allow_exceptions=*/false);
        if (j.is_discarded() || !j.is_object()) {
            throw Error(ErrorCode::MalformedLine, fmt::format("line {}: not a JSON object", line_no));
        }
        if (!j.contains("ts") || !j["ts"].is_string()) {
            throw Error(ErrorCode::MalformedLine, fmt::format("line {}: missing string field 'ts'", line_no));
        }
        if (!j.contains("text") || !j["text"].is_string()) {
            throw Error(ErrorCode::MalformedLine,
                        fmt::format("line {}: missing string field 'text'", line_no));
        }
        auto ts = parse_timestamp(j["ts"].get<std::string>());
        if (!ts) {
            throw Error(ErrorCode::MalformedLine, fmt::format("line {}: bad timestamp", line_no));
        }
        auto text = j["text"].get<std::string>();
        if (text.empty()) {
            throw Error(ErrorCode::EmptyText, fmt::format("line {}: empty text", line_no));
        }
        out.push_back(TweetRecord{*ts, std::move(text), tag});
    }
    return out;
}

std::vector<TweetRecord> load_tweets(const std::filesystem::path& path, SourceTag tag) {
    return parse_tweets(io::read_file(path), tag);
}

std::string format_tweets(const std::vector<TweetRecord>& tweets) {
    std::string out;
    for (const auto& t : tweets) {
        const int s = t.timestamp.seconds_of_day;
        nlohmann::ordered_json j;
        j["ts"] = fmt::format("{}T{:02d}:{:02d}:{:02d}", t.timestamp.date.to_string(), s / 3600,
                              (s / 60) % 60, s % 60);
        j["text"] = t.text;
        out += j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
        out += '\n';
    }
    return out;
}

}  // namespace sentrade
