#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "kickrom/params.hpp"

namespace kickrom {

/// Flat key-value configuration with sectioned keys.
///
/// Text form:
///
///     # comment
///     [system]
///     F = 12.95
///     [pod]
///     tolerance = 1e-4
///
/// Keys are addressed as "section.name". Keys outside any section live in
/// the root namespace. Every successful lookup marks the key as consumed so
/// callers can reject typos with `unconsumed()`.
class KeyValueConfig {
public:
    KeyValueConfig() = default;

    static KeyValueConfig parse(const std::string& text);
    static KeyValueConfig load(const std::string& path);

    void set(const std::string& key, const std::string& value);
    /// Applies a "key=value" override.
    void apply_override(const std::string& assignment);

    bool contains(const std::string& key) const;
    std::optional<std::string> raw(const std::string& key) const;

    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;

    /// Keys that were never read.
    std::vector<std::string> unconsumed() const;
    const std::map<std::string, std::string>& entries() const { return entries_; }

    std::string to_text() const;

private:
    std::map<std::string, std::string> entries_;
    mutable std::set<std::string> consumed_;
};

/// Reads the [system] section. A [dimensioned] block, when present, is
/// rescaled first; explicit [system] keys still override its results.
SystemParams read_system_params(const KeyValueConfig& cfg);
void write_system_params(KeyValueConfig& cfg, const SystemParams& p);

}  // namespace kickrom
