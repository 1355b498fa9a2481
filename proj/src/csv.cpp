#include "flowembed/csv.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace flowembed::csv {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_bool(bool b) { return b ? "1" : "0"; }

std::string format_optional(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
}

namespace {

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cell);
            cell.clear();
        } else {
            cell.push_back(ch);
        }
    }
    out.push_back(cell);
    return out;
}

}  // namespace

std::string Table::to_string() const {
    std::ostringstream os;
    for (const auto& [key, value] : metadata) os << "# " << key << "=" << value << "\n";
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) os << ",";
        os << header[i];
    }
    os << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) os << ",";
            os << row[i];
        }
        os << "\n";
    }
    return os.str();
}

Table parse(const std::string& text) {
    Table t;
    std::istringstream is(text);
    std::string line;
    bool header_seen = false;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::string body = line.substr(line.size() > 1 && line[1] == ' ' ? 2 : 1);
            const std::size_t eq = body.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument("csv::parse: malformed metadata line: " + line);
            t.metadata.emplace_back(body.substr(0, eq), body.substr(eq + 1));
            continue;
        }
        if (!header_seen) {
            t.header = split_row(line);
            header_seen = true;
        } else {
            t.rows.push_back(split_row(line));
        }
    }
    if (!header_seen) throw std::invalid_argument("csv::parse: missing header row");
    return t;
}

}  // namespace flowembed::csv
