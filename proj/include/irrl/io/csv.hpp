#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "irrl/errors.hpp"

namespace irrl {

/// Shortest round-trip decimal form of a double; locale-independent, so CSV
/// output is byte-stable across runs.
inline std::string format_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

/// Line-buffered CSV writer with '\n' line endings. With `append` the header
/// is only written when the file does not already have content.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::string& header, bool append = false)
        : out_(path, append ? (std::ios::binary | std::ios::app) : std::ios::binary) {
        if (!out_) throw IoError("cannot open for writing: " + path);
        if (!append || out_.tellp() == std::streampos(0)) out_ << header << '\n';
    }

    class Row {
    public:
        explicit Row(std::ofstream& out) : out_(out) {}
        Row& col(const std::string& s) {
            sep();
            out_ << s;
            return *this;
        }
        Row& col(double v) { return col(format_double(v)); }
        Row& col(std::int64_t v) { return col(std::to_string(v)); }
        ~Row() { out_ << '\n'; }
        Row(const Row&) = delete;
        Row& operator=(const Row&) = delete;

    private:
        void sep() {
            if (!first_) out_ << ',';
            first_ = false;
        }
        std::ofstream& out_;
        bool first_ = true;
    };

    Row row() { return Row(out_); }

    void flush() { out_.flush(); }

private:
    std::ofstream out_;
};

/// Whole-file CSV parse into header + string cells. No quoting support; none
/// of the emitted files need it.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) return static_cast<int>(i);
        }
        return -1;
    }
};

inline CsvTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);
    CsvTable table;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() && in.eof()) break;
        std::vector<std::string> cells;
        std::string cell;
        std::stringstream ss(line);
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (line.empty() || line.back() == ',') cells.push_back("");
        if (first) {
            table.header = std::move(cells);
            first = false;
        } else {
            table.rows.push_back(std::move(cells));
        }
    }
    return table;
}

}  // namespace irrl
