// Small CSV helpers shared by the experiment and analysis modules. Fields in
// our files never contain commas or quotes, so a plain split is enough.
// Doubles are printed with %.17g so re-reading round-trips exactly and
// repeated writes are byte-identical.
#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace netcomm {

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

// A header-indexed CSV table.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::map<std::string, std::size_t> index;

    std::size_t column(const std::string& name) const {
        const auto it = index.find(name);
        if (it == index.end()) throw std::runtime_error("CSV missing column \"" + name + "\"");
        return it->second;
    }

    const std::string& cell(std::size_t row, const std::string& name) const {
        return rows[row][column(name)];
    }

    double number(std::size_t row, const std::string& name) const {
        const std::string& s = cell(row, name);
        try {
            return std::stod(s);
        } catch (const std::exception&) {
            throw std::runtime_error("CSV field \"" + name + "\" is not numeric: \"" + s + "\"");
        }
    }
};

inline CsvTable read_csv(std::istream& in) {
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty CSV input");
    t.header = split_csv_line(line);
    for (std::size_t i = 0; i < t.header.size(); ++i) t.index[t.header[i]] = i;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != t.header.size()) {
            throw std::runtime_error("CSV row has " + std::to_string(fields.size()) +
                                     " fields, header has " + std::to_string(t.header.size()));
        }
        t.rows.push_back(std::move(fields));
    }
    return t;
}

inline CsvTable read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open CSV file: " + path);
    return read_csv(in);
}

} // namespace netcomm
