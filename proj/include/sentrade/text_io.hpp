#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sentrade::io {

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

/// Splits on `sep` without quoting support (all our CSV payloads are numeric
/// or ISO dates).
std::vector<std::string_view> split(std::string_view line, char sep);

/// Splits text into lines, dropping a trailing '\r' from each.
std::vector<std::string_view> lines(std::string_view text);

std::string_view trim(std::string_view s);

std::optional<double> parse_double(std::string_view s);

/// Shortest decimal representation that round-trips exactly.
std::string format_double(double x);

}  // namespace sentrade::io
