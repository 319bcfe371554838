#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "sspec/errors.hpp"

namespace sspec {

/// Render a double with 17 significant digits (lossless round trip).
inline std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// Minimal CSV writer: header row, 17-digit floats, LF line endings,
/// deterministic byte output for identical inputs.
class CsvWriter {
  public:
    explicit CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

    void row(const std::vector<double>& values) {
        if (values.size() != header_.size())
            throw domain_error("CsvWriter: row width mismatch");
        rows_.push_back(values);
    }

    std::string str() const {
        std::string out;
        for (std::size_t i = 0; i < header_.size(); ++i) {
            if (i) out += ',';
            out += header_[i];
        }
        out += '\n';
        for (const auto& r : rows_) {
            for (std::size_t i = 0; i < r.size(); ++i) {
                if (i) out += ',';
                out += fmt17(r[i]);
            }
            out += '\n';
        }
        return out;
    }

    void write(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw domain_error("CsvWriter: cannot open " + path);
        out << str();
    }

  private:
    std::vector<std::string> header_;
    std::vector<std::vector<double>> rows_;
};

inline std::vector<std::vector<double>> read_csv_numeric(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw domain_error("read_csv_numeric: cannot open " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        for (char& ch : line)
            if (ch == ',') ch = ' ';
        std::istringstream ss(line);
        std::vector<double> row;
        double v;
        while (ss >> v) row.push_back(v);
        if (!row.empty()) rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace sspec
