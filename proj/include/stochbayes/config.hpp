#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

namespace stochbayes {

/// Raised when a config/scenario/model file is missing or malformed.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Plain `key = value` file with '#' comments. Values stay strings until a
/// typed getter is called, so each consumer decides its own schema.
class KeyValueFile {
public:
    /// Parses the file at `path`. Throws ConfigError naming the path when it
    /// cannot be opened and naming the line on a syntax error.
    static KeyValueFile load(const std::string& path);

    /// Parses in-memory text (for tests and defaults).
    static KeyValueFile parse(const std::string& text, const std::string& origin = "<inline>");

    bool has(const std::string& key) const { return values_.count(key) != 0; }

    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    std::uint64_t get_u64(const std::string& key) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    int get_int(const std::string& key, int fallback) const;
    const std::string& get_string(const std::string& key) const;

    const std::map<std::string, std::string>& values() const { return values_; }
    const std::string& origin() const { return origin_; }

private:
    std::map<std::string, std::string> values_;
    std::string origin_;
};

} // namespace stochbayes
