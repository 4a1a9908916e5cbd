#pragma once

// Minimal RFC 4180 reader/writer for the toolkit's flat tables.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "jetcool/error.hpp"

namespace jetcool::csv {

using Row = std::vector<std::string>;

inline Row split_line(const std::string& line) {
    Row out;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(field));
            field.clear();
        } else if (c != '\r') {
            field.push_back(c);
        }
    }
    out.push_back(std::move(field));
    return out;
}

inline std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q.push_back('"');
        q.push_back(c);
    }
    q.push_back('"');
    return q;
}

inline std::string join(const Row& row) {
    std::string out;
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out.push_back(',');
        out += quote(row[i]);
    }
    return out;
}

struct Table {
    Row header;
    std::vector<Row> rows;

    std::size_t column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        throw Error(ErrorKind::config, "missing CSV column '" + name + "'");
    }
};

/// Reads a table; leading lines starting with '#' are returned in `comments` (without '#').
inline Table read(std::istream& in, std::vector<std::string>* comments = nullptr) {
    Table t;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!have_header && !line.empty() && line[0] == '#') {
            if (comments) comments->push_back(line.substr(1));
            continue;
        }
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        if (!have_header) {
            t.header = split_line(line);
            have_header = true;
        } else {
            t.rows.push_back(split_line(line));
            if (t.rows.back().size() != t.header.size())
                throw Error(ErrorKind::config, "CSV row has " + std::to_string(t.rows.back().size()) +
                                                   " fields, header has " + std::to_string(t.header.size()));
        }
    }
    if (!have_header) throw Error(ErrorKind::config, "CSV input is empty");
    return t;
}

inline Table read_file(const std::string& path, std::vector<std::string>* comments = nullptr) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::config, "cannot open '" + path + "'");
    return read(in, comments);
}

inline double to_double(const std::string& s, const std::string& what = "value") {
    std::string trimmed = s;
    trimmed.erase(0, trimmed.find_first_not_of(" \t"));
    trimmed.erase(trimmed.find_last_not_of(" \t") + 1);
    if (trimmed == "inf") return std::numeric_limits<double>::infinity();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(trimmed.data(), trimmed.data() + trimmed.size(), v);
    if (ec != std::errc() || ptr != trimmed.data() + trimmed.size() || trimmed.empty())
        throw Error(ErrorKind::config, "cannot parse " + what + " '" + s + "' as a number");
    return v;
}

/// Shortest round-trip decimal representation.
inline std::string fmt(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace jetcool::csv
