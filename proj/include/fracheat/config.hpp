#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fracheat {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Flat key-value config with [section] headers and # comments. Repeated
/// keys are kept in order (used for mode lists).
class ParsedConfig {
public:
    void set(const std::string& section, const std::string& key,
             const std::string& value);

    bool has(const std::string& section, const std::string& key) const;
    std::string get(const std::string& section, const std::string& key) const;
    std::string get_or(const std::string& section, const std::string& key,
                       const std::string& fallback) const;
    double get_num(const std::string& section, const std::string& key) const;
    double get_num_or(const std::string& section, const std::string& key,
                      double fallback) const;
    int get_int_or(const std::string& section, const std::string& key,
                   int fallback) const;
    bool get_bool_or(const std::string& section, const std::string& key,
                     bool fallback) const;
    std::vector<std::string> get_all(const std::string& section,
                                     const std::string& key) const;
    /// Whitespace-separated numbers in the value of `key`.
    std::vector<double> get_list(const std::string& section,
                                 const std::string& key) const;

private:
    std::map<std::string, std::vector<std::pair<std::string, std::string>>>
        sections_;
};

/// Parses `path`; throws ConfigError naming the path when the file is
/// missing or malformed.
ParsedConfig parse_config_file(const std::string& path);
ParsedConfig parse_config_text(const std::string& text,
                               const std::string& origin = "<text>");

}  // namespace fracheat
