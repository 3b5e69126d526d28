#include "fracheat/config.hpp"

#include <fstream>
#include <sstream>

namespace fracheat {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

void ParsedConfig::set(const std::string& section, const std::string& key,
                       const std::string& value) {
    sections_[section].emplace_back(key, value);
}

bool ParsedConfig::has(const std::string& section,
                       const std::string& key) const {
    const auto it = sections_.find(section);
    if (it == sections_.end()) return false;
    for (const auto& [k, v] : it->second)
        if (k == key) return true;
    return false;
}

std::string ParsedConfig::get(const std::string& section,
                              const std::string& key) const {
    const auto it = sections_.find(section);
    if (it != sections_.end())
        for (const auto& [k, v] : it->second)
            if (k == key) return v;
    throw ConfigError("missing config key [" + section + "] " + key);
}

std::string ParsedConfig::get_or(const std::string& section,
                                 const std::string& key,
                                 const std::string& fallback) const {
    return has(section, key) ? get(section, key) : fallback;
}

double ParsedConfig::get_num(const std::string& section,
                             const std::string& key) const {
    const std::string v = get(section, key);
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (trim(v.substr(pos)).empty()) return d;
    } catch (const std::exception&) {
    }
    throw ConfigError("config key [" + section + "] " + key +
                      " is not a number: '" + v + "'");
}

double ParsedConfig::get_num_or(const std::string& section,
                                const std::string& key,
                                double fallback) const {
    return has(section, key) ? get_num(section, key) : fallback;
}

int ParsedConfig::get_int_or(const std::string& section,
                             const std::string& key, int fallback) const {
    return has(section, key) ? static_cast<int>(get_num(section, key))
                             : fallback;
}

bool ParsedConfig::get_bool_or(const std::string& section,
                               const std::string& key, bool fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = get(section, key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config key [" + section + "] " + key +
                      " is not a boolean: '" + v + "'");
}

std::vector<std::string> ParsedConfig::get_all(const std::string& section,
                                               const std::string& key) const {
    std::vector<std::string> out;
    const auto it = sections_.find(section);
    if (it != sections_.end())
        for (const auto& [k, v] : it->second)
            if (k == key) out.push_back(v);
    return out;
}

std::vector<double> ParsedConfig::get_list(const std::string& section,
                                           const std::string& key) const {
    std::istringstream is(get(section, key));
    std::vector<double> out;
    double v;
    while (is >> v) out.push_back(v);
    if (out.empty())
        throw ConfigError("config key [" + section + "] " + key +
                          " holds no numbers");
    return out;
}

ParsedConfig parse_config_text(const std::string& text,
                               const std::string& origin) {
    ParsedConfig cfg;
    std::istringstream is(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(origin + ":" + std::to_string(lineno) +
                                  ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) +
                              ": expected key = value");
        cfg.set(section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

ParsedConfig parse_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f)
        throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str(), path);
}

}  // namespace fracheat
