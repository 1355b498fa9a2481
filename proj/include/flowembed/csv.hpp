#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace flowembed::csv {

/// 17 significant digits; round-trips every finite double exactly.
std::string format_double(double v);

std::string format_bool(bool b);

std::string format_optional(const std::optional<double>& v);

/// A CSV document: a leading block of `# key=value` metadata lines, a
/// mandatory header row, then data rows. Comma delimiter, `.` decimal
/// point, LF line endings.
struct Table {
    std::vector<std::pair<std::string, std::string>> metadata;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::string to_string() const;
};

/// Inverse of Table::to_string, for round-trip checks and downstream
/// consumers.
Table parse(const std::string& text);

}  // namespace flowembed::csv
