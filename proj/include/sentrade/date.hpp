#pragma once

#include <chrono>
#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace sentrade {

/// Calendar date backed by a day count since the Unix epoch.
class Date {
public:
    constexpr Date() = default;
    explicit constexpr Date(std::chrono::sys_days days) : days_(days) {}
    Date(int y, unsigned m, unsigned d);

    /// Parses `YYYY-MM-DD`; returns nullopt on any malformed or invalid date.
    static std::optional<Date> parse(std::string_view iso);

    std::string to_string() const;
    std::chrono::sys_days sys_days() const { return days_; }
    bool is_weekday() const;

    Date next_day() const { return Date(days_ + std::chrono::days{1}); }
    Date next_weekday() const;

    auto operator<=>(const Date&) const = default;

private:
    std::chrono::sys_days days_{};
};

/// Parses an ISO-8601 datetime (`YYYY-MM-DDThh:mm[:ss[.fff]]` with optional
/// `Z` or `±hh:mm` suffix). The calendar day is taken verbatim from the text;
/// no timezone shifting is applied.
struct Timestamp {
    Date date;
    int seconds_of_day = 0;
};

std::optional<Timestamp> parse_timestamp(std::string_view iso);

}  // namespace sentrade
