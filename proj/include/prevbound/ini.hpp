#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "prevbound/errors.hpp"

namespace prevbound {

// Sectioned key/value config format used for the code-set file and for
// simulation scenarios:
//
//   # comment
//   [section.name]
//   key = value
//   codes = A00 B01.1 C22       (lists split on whitespace or commas)
//
// Repeated keys append; section and key lookups are case-sensitive.

struct IniEntry {
    std::string key;
    std::string value;
};

struct IniSection {
    std::string name;
    std::vector<IniEntry> entries;
};

class IniDoc {
public:
    static IniDoc parse(std::string_view text, const std::string& origin);
    static IniDoc load(const std::string& path);

    bool has_section(std::string_view name) const;
    const IniSection* section(std::string_view name) const;

    // Single-valued lookup; throws ConfigError when the key repeats.
    std::optional<std::string> get(std::string_view section, std::string_view key) const;
    std::string get_or(std::string_view section, std::string_view key,
                       std::string defval) const;
    std::string require(std::string_view section, std::string_view key) const;

    double require_number(std::string_view section, std::string_view key) const;
    std::optional<double> get_number(std::string_view section, std::string_view key) const;

    // All values for a key, each further split into whitespace/comma tokens.
    std::vector<std::string> get_list(std::string_view section, std::string_view key) const;

    const std::vector<IniSection>& sections() const { return sections_; }
    const std::string& origin() const { return origin_; }

private:
    std::vector<IniSection> sections_;
    std::string origin_;
};

std::vector<std::string> split_tokens(std::string_view value);
double parse_number(std::string_view s, const std::string& context);
long long parse_integer(std::string_view s, const std::string& context);

}  // namespace prevbound
