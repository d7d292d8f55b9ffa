#include "stochbayes/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace stochbayes {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

} // namespace

KeyValueFile KeyValueFile::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path);
}

KeyValueFile KeyValueFile::parse(const std::string& text, const std::string& origin) {
    KeyValueFile kv;
    kv.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(origin + ":" + std::to_string(lineno) +
                              ": expected 'key = value', got '" + line + "'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key or value");
        }
        kv.values_[key] = value;
    }
    return kv;
}

double KeyValueFile::get_double(const std::string& key) const {
    const std::string& raw = get_string(key);
    try {
        std::size_t pos = 0;
        const double v = std::stod(raw, &pos);
        if (pos != raw.size()) {
            throw std::invalid_argument(raw);
        }
        return v;
    } catch (const std::exception&) {
        throw ConfigError(origin_ + ": key '" + key + "' is not a number: '" + raw + "'");
    }
}

double KeyValueFile::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

std::uint64_t KeyValueFile::get_u64(const std::string& key) const {
    const std::string& raw = get_string(key);
    try {
        std::size_t pos = 0;
        const std::uint64_t v = std::stoull(raw, &pos);
        if (pos != raw.size()) {
            throw std::invalid_argument(raw);
        }
        return v;
    } catch (const std::exception&) {
        throw ConfigError(origin_ + ": key '" + key + "' is not an unsigned integer: '" + raw + "'");
    }
}

std::uint64_t KeyValueFile::get_u64(const std::string& key, std::uint64_t fallback) const {
    return has(key) ? get_u64(key) : fallback;
}

int KeyValueFile::get_int(const std::string& key, int fallback) const {
    if (!has(key)) {
        return fallback;
    }
    return static_cast<int>(get_u64(key));
}

const std::string& KeyValueFile::get_string(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) {
        throw ConfigError(origin_ + ": missing key '" + key + "'");
    }
    return it->second;
}

} // namespace stochbayes
