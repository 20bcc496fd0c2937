#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "irrl/errors.hpp"

namespace irrl {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << content;
    if (!out) throw IoError("write failed: " + path);
}

inline void ensure_dir(const std::string& path) {
    std::error_code ec;
    std::filesystem::create_directories(path, ec);
    if (ec) throw IoError("cannot create directory " + path + ": " + ec.message());
}

}  // namespace irrl
