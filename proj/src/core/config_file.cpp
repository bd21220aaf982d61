#include "config_file.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <sstream>

#include "errors.hpp"

namespace dbvn {
namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return {};
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

} // namespace

namespace {

ConfigFile parse_impl(std::istream& in, bool allow_overrides, ConfigFile& cfg,
                      std::vector<std::pair<std::string, std::string>>& items) {
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::string s = trim(line);
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']')
                fail(Status::config_error,
                     "config line " + std::to_string(lineno) + ": unterminated section header");
            continue;  // sections are organizational only
        }
        size_t eq = s.find('=');
        if (eq == std::string::npos)
            fail(Status::config_error,
                 "config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(s.substr(0, eq));
        std::string value = trim(s.substr(eq + 1));
        if (key.empty() || value.empty())
            fail(Status::config_error,
                 "config line " + std::to_string(lineno) + ": empty key or value");
        bool replaced = false;
        for (auto& [k, v] : items)
            if (k == key) {
                if (!allow_overrides)
                    fail(Status::config_error, "config line " + std::to_string(lineno) +
                                                   ": duplicate key '" + key + "'");
                v = value;
                replaced = true;
                break;
            }
        if (!replaced) items.emplace_back(std::move(key), std::move(value));
    }
    return cfg;
}

} // namespace

ConfigFile ConfigFile::parse(std::istream& in) {
    ConfigFile cfg;
    return parse_impl(in, false, cfg, cfg.items_);
}

ConfigFile ConfigFile::parse_with_overrides(std::istream& in) {
    ConfigFile cfg;
    return parse_impl(in, true, cfg, cfg.items_);
}

ConfigFile ConfigFile::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Status::io_error, "cannot open config file: " + path);
    return parse(in);
}

const std::string* ConfigFile::find(const std::string& key) const {
    for (const auto& [k, v] : items_)
        if (k == key) return &v;
    return nullptr;
}

bool ConfigFile::has(const std::string& key) const { return find(key) != nullptr; }

std::string ConfigFile::get_string(const std::string& key) const {
    const std::string* v = find(key);
    if (!v) fail(Status::config_error, "missing config key '" + key + "'");
    return *v;
}

std::string ConfigFile::get_string(const std::string& key, const std::string& fallback) const {
    const std::string* v = find(key);
    return v ? *v : fallback;
}

double ConfigFile::get_double(const std::string& key) const {
    std::string v = get_string(key);
    char* end = nullptr;
    double d = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0')
        fail(Status::config_error, "config key '" + key + "': not a number: " + v);
    return d;
}

double ConfigFile::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

int64_t ConfigFile::get_int(const std::string& key) const {
    double d = get_double(key);
    int64_t i = static_cast<int64_t>(d);
    if (static_cast<double>(i) != d)
        fail(Status::config_error, "config key '" + key + "': expected an integer");
    return i;
}

int64_t ConfigFile::get_int(const std::string& key, int64_t fallback) const {
    return has(key) ? get_int(key) : fallback;
}

bool ConfigFile::get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    std::string v = get_string(key);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    fail(Status::config_error, "config key '" + key + "': not a boolean: " + v);
}

std::vector<double> ConfigFile::get_list(const std::string& key) const {
    std::string v = get_string(key);
    std::replace(v.begin(), v.end(), ',', ' ');
    std::istringstream in(v);
    std::vector<double> out;
    double d;
    while (in >> d) out.push_back(d);
    if (!in.eof())
        fail(Status::config_error, "config key '" + key + "': not a number list");
    if (out.empty())
        fail(Status::config_error, "config key '" + key + "': empty list");
    return out;
}

void ConfigFile::restrict_keys(const std::vector<std::string>& allowed) const {
    for (const auto& [k, v] : items_)
        if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
            fail(Status::config_error, "unknown config key '" + k + "'");
}

} // namespace dbvn
