#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace plate {

// Flat key = value configuration with dotted key prefixes, e.g.
//
//     experiment     = simulate
//     grid.n         = 1
//     grid.N         = 256
//     nonlinear.lambda = 3
//
// '#' starts a comment; blank lines are ignored.  Duplicate keys are a
// ConfigError.  Typed getters record which keys were consumed so a run can
// reject configs containing keys it never read (typo protection).
class Config {
public:
    static Config parse_file(const std::string& path);
    static Config parse_string(const std::string& text);

    bool has(const std::string& key) const;

    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key) const;
    int get_int(const std::string& key, int fallback) const;
    std::uint64_t get_u64(const std::string& key) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key) const;
    bool get_bool(const std::string& key, bool fallback) const;

    // Comma-separated list values.
    std::vector<std::string> get_list(const std::string& key) const;
    std::vector<double> get_double_list(const std::string& key) const;

    // All keys with the given dotted prefix (prefix itself excluded).
    std::vector<std::string> keys_with_prefix(const std::string& prefix) const;

    // Throws ConfigError naming any key that was never consumed by a getter.
    void ensure_all_consumed() const;

    // A copy with one key set (added or replaced) and a regenerated source
    // text; used by parameter sweeps to derive per-item configs.
    Config with_override(const std::string& key, const std::string& value) const;

    // A copy with every key under the given dotted prefix removed.
    Config without_prefix(const std::string& prefix) const;

    // The verbatim text the config was parsed from (for snapshots).
    const std::string& source_text() const { return source_; }

private:
    std::map<std::string, std::string> values_;
    mutable std::set<std::string> consumed_;
    std::string source_;

    const std::string& raw(const std::string& key) const;
};

} // namespace plate
