#pragma once
#include <string>
#include <vector>

namespace dbvn {

/// Line-oriented `key = value` configuration with optional `[section]`
/// headers. Sections are purely organizational; keys live in one flat
/// namespace and may not repeat. `#` starts a comment.
class ConfigFile {
public:
    static ConfigFile parse(std::istream& in);
    // Same grammar, but a repeated key overrides the earlier value instead of
    // erroring (used to apply command-line overrides on top of a file).
    static ConfigFile parse_with_overrides(std::istream& in);
    static ConfigFile load(const std::string& path);

    bool has(const std::string& key) const;

    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    int64_t get_int(const std::string& key) const;
    int64_t get_int(const std::string& key, int64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    // Whitespace- or comma-separated numbers.
    std::vector<double> get_list(const std::string& key) const;

    // Rejects keys outside the allowed set (typo protection).
    void restrict_keys(const std::vector<std::string>& allowed) const;

    const std::vector<std::pair<std::string, std::string>>& items() const { return items_; }

private:
    const std::string* find(const std::string& key) const;
    std::vector<std::pair<std::string, std::string>> items_;
};

} // namespace dbvn
