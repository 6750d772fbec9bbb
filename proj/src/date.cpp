#include "sentrade/date.hpp"

#include <algorithm>
#include <charconv>

#include <fmt/format.h>

namespace sentrade {

namespace {

bool parse_fixed_int(std::string_view s, int& out) {
    if (s.empty()) return false;
    for (char c : s) {
        if (c < '0' || c > '9') return false;
    }
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace

Date::Date(int y, unsigned m, unsigned d)
    : days_(std::chrono::year_month_day{std::chrono::year{y}, std::chrono::month{m},
                                        std::chrono::day{d}}) {}

std::optional<Date> Date::parse(std::string_view iso) {
    if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') return std::nullopt;
    int y = 0, m = 0, d = 0;
    if (!parse_fixed_int(iso.substr(0, 4), y) || !parse_fixed_int(iso.substr(5, 2), m) ||
        !parse_fixed_int(iso.substr(8, 2), d)) {
        return std::nullopt;
    }
    std::chrono::year_month_day ymd{std::chrono::year{y},
                                    std::chrono::month{static_cast<unsigned>(m)},
                                    std::chrono::day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;
    return Date(std::chrono::sys_days{ymd});
}

std::string Date::to_string() const {
    std::chrono::year_month_day ymd{days_};
    return fmt::format("{:04d}-{:02d}-{:02d}", static_cast<int>(ymd.year()),
                       static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
}

bool Date::is_weekday() const {
    const unsigned wd = std::chrono::weekday{days_}.c_encoding();
    return wd != 0 && wd != 6;
}

Date Date::next_weekday() const {
    Date d = next_day();
    while (!d.is_weekday()) d = d.next_day();
    return d;
}

std::optional<Timestamp> parse_timestamp(std::string_view iso) {
    if (iso.size() < 16) return std::nullopt;
    auto date = Date::parse(iso.substr(0, 10));
    if (!date || (iso[10] != 'T' && iso[10] != ' ')) return std::nullopt;

    int hh = 0, mm = 0, ss = 0;
    if (!parse_fixed_int(iso.substr(11, 2), hh) || iso[13] != ':' ||
        !parse_fixed_int(iso.substr(14, 2), mm)) {
        return std::nullopt;
    }
    std::size_t pos = 16;
    if (pos < iso.size() && iso[pos] == ':') {
        if (iso.size() < pos + 3 || !parse_fixed_int(iso.substr(pos + 1, 2), ss)) {
            return std::nullopt;
        }
        pos += 3;
        if (pos < iso.size() && iso[pos] == '.') {
            ++pos;
            const std::size_t start = pos;
            while (pos < iso.size() && iso[pos] >= '0' && iso[pos] <= '9') ++pos;
            if (pos == start) return std::nullopt;
        }
    }
    if (hh > 23 || mm > 59 || ss > 60) return std::nullopt;

    std::string_view zone = iso.substr(pos);
    if (!zone.empty() && zone != "Z") {
        int zh = 0, zm = 0;
        if (zone.size() != 6 || (zone[0] != '+' && zone[0] != '-') || zone[3] != ':' ||
            !parse_fixed_int(zone.substr(1, 2), zh) || !parse_fixed_int(zone.substr(4, 2), zm)) {
            return std::nullopt;
        }
    }
    return Timestamp{*date, hh * 3600 + mm * 60 + std::min(ss, 59)};
}

}  // namespace sentrade
