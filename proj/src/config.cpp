#include "plate/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "plate/errors.hpp"

namespace plate {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

} // namespace

Config Config::parse_string(const std::string& text) {
    Config cfg;
    cfg.source_ = text;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::string stripped = trim(line);
        if (stripped.empty()) continue;
        std::size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": expected 'key = value', got '" + stripped + "'");
        std::string key = trim(stripped.substr(0, eq));
        std::string value = trim(stripped.substr(eq + 1));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        if (!cfg.values_.emplace(key, value).second)
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": duplicate key '" + key + "'");
    }
    return cfg;
}

Config Config::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str());
}

bool Config::has(const std::string& key) const { return values_.count(key) > 0; }

const std::string& Config::raw(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end())
        throw ConfigError("config: missing required key '" + key + "'");
    consumed_.insert(key);
    return it->second;
}

std::string Config::get_string(const std::string& key) const { return raw(key); }

std::string Config::get_string(const std::string& key,
                               const std::string& fallback) const {
    return has(key) ? raw(key) : fallback;
}

double Config::get_double(const std::string& key) const {
    const std::string& v = raw(key);
    if (v == "inf") return INFINITY;
    if (v == "-inf") return -INFINITY;
    errno = 0;
    char* end = nullptr;
    double out = std::strtod(v.c_str(), &end);
    if (errno != 0 || end != v.c_str() + v.size() || v.empty())
        throw ConfigError("config: key '" + key + "' is not a number: '" + v + "'");
    return out;
}

double Config::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

int Config::get_int(const std::string& key) const {
    const std::string& v = raw(key);
    errno = 0;
    char* end = nullptr;
    long out = std::strtol(v.c_str(), &end, 10);
    if (errno != 0 || end != v.c_str() + v.size() || v.empty())
        throw ConfigError("config: key '" + key + "' is not an integer: '" + v + "'");
    return static_cast<int>(out);
}

int Config::get_int(const std::string& key, int fallback) const {
    return has(key) ? get_int(key) : fallback;
}

std::uint64_t Config::get_u64(const std::string& key) const {
    const std::string& v = raw(key);
    errno = 0;
    char* end = nullptr;
    unsigned long long out = std::strtoull(v.c_str(), &end, 10);
    if (errno != 0 || end != v.c_str() + v.size() || v.empty())
        throw ConfigError("config: key '" + key + "' is not an unsigned integer: '" +
                          v + "'");
    return out;
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
    return has(key) ? get_u64(key) : fallback;
}

bool Config::get_bool(const std::string& key) const {
    const std::string& v = raw(key);
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("config: key '" + key + "' is not a boolean: '" + v + "'");
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    return has(key) ? get_bool(key) : fallback;
}

std::vector<std::string> Config::get_list(const std::string& key) const {
    const std::string& v = raw(key);
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(v);
    while (std::getline(in, item, ',')) {
        std::string t = trim(item);
        if (!t.empty()) out.push_back(t);
    }
    if (out.empty())
        throw ConfigError("config: key '" + key + "' holds an empty list");
    return out;
}

std::vector<double> Config::get_double_list(const std::string& key) const {
    std::vector<double> out;
    for (const std::string& item : get_list(key)) {
        if (item == "inf") {
            out.push_back(INFINITY);
            continue;
        }
        errno = 0;
        char* end = nullptr;
        double v = std::strtod(item.c_str(), &end);
        if (errno != 0 || end != item.c_str() + item.size())
            throw ConfigError("config: list '" + key + "' has a non-number: '" +
                              item + "'");
        out.push_back(v);
    }
    return out;
}

std::vector<std::string> Config::keys_with_prefix(const std::string& prefix) const {
    std::vector<std::string> out;
    for (const auto& [k, v] : values_)
        if (k.size() > prefix.size() && k.compare(0, prefix.size(), prefix) == 0)
            out.push_back(k);
    return out;
}

Config Config::with_override(const std::string& key, const std::string& value) const {
    Config out;
    out.values_ = values_;
    out.values_.insert_or_assign(key, value);
    std::ostringstream text;
    for (const auto& [k, v] : out.values_) text << k << " = " << v << "\n";
    out.source_ = text.str();
    return out;
}

Config Config::without_prefix(const std::string& prefix) const {
    Config out;
    for (const auto& [k, v] : values_) {
        if (k.size() > prefix.size() && k.compare(0, prefix.size(), prefix) == 0)
            continue;
        out.values_.emplace(k, v);
    }
    std::ostringstream text;
    for (const auto& [k, v] : out.values_) text << k << " = " << v << "\n";
    out.source_ = text.str();
    return out;
}

void Config::ensure_all_consumed() const {
    for (const auto& [k, v] : values_) {
        if (!consumed_.count(k))
            throw ConfigError("config: unknown key '" + k + "'");
    }
}

} // namespace plate
