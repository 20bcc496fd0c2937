#pragma once

#include <stdexcept>
#include <string>

namespace irrl {

/// Invalid configuration (bad field value, infeasible placement, bad CLI input).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Filesystem / stream failure.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// Persisted-file schema version mismatch.
class SchemaError : public std::runtime_error {
public:
    explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace irrl
