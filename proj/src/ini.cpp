#include "prevbound/ini.hpp"

#include <cerrno>
#include <cstdlib>

#include "prevbound/csv.hpp"

namespace prevbound {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

}  // namespace

IniDoc IniDoc::parse(std::string_view text, const std::string& origin) {
    IniDoc doc;
    doc.origin_ = origin;
    IniSection* current = nullptr;
    for_each_line(text, [&](std::uint64_t line_no, std::string_view raw) {
        std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#' || line.front() == ';') return;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw Error(Errc::config_error,
                            origin + ": unterminated section header", line_no);
            std::string_view name = trim(line.substr(1, line.size() - 2));
            if (name.empty())
                throw Error(Errc::config_error, origin + ": empty section name", line_no);
            doc.sections_.push_back(IniSection{std::string(name), {}});
            current = &doc.sections_.back();
            return;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            throw Error(Errc::config_error, origin + ": expected key = value", line_no);
        if (!current)
            throw Error(Errc::config_error, origin + ": key/value before any section", line_no);
        std::string_view key = trim(line.substr(0, eq));
        std::string_view value = trim(line.substr(eq + 1));
        if (key.empty())
            throw Error(Errc::config_error, origin + ": empty key", line_no);
        current->entries.push_back(IniEntry{std::string(key), std::string(value)});
    });
    return doc;
}

IniDoc IniDoc::load(const std::string& path) {
    return parse(read_file(path), path);
}

bool IniDoc::has_section(std::string_view name) const { return section(name) != nullptr; }

const IniSection* IniDoc::section(std::string_view name) const {
    for (const IniSection& s : sections_) {
        if (s.name == name) return &s;
    }
    return nullptr;
}

std::optional<std::string> IniDoc::get(std::string_view sec, std::string_view key) const {
    const IniSection* s = section(sec);
    if (!s) return std::nullopt;
    const std::string* found = nullptr;
    for (const IniEntry& e : s->entries) {
        if (e.key == key) {
            if (found)
                throw Error(Errc::config_error, origin_ + ": key '" + std::string(key) +
                                                    "' repeats in [" + std::string(sec) + "]");
            found = &e.value;
        }
    }
    if (!found) return std::nullopt;
    return *found;
}

std::string IniDoc::get_or(std::string_view sec, std::string_view key, std::string defval) const {
    auto v = get(sec, key);
    return v ? *v : std::move(defval);
}

std::string IniDoc::require(std::string_view sec, std::string_view key) const {
    auto v = get(sec, key);
    if (!v)
        throw Error(Errc::config_error, origin_ + ": missing [" + std::string(sec) + "] " +
                                            std::string(key));
    return *v;
}

double IniDoc::require_number(std::string_view sec, std::string_view key) const {
    return parse_number(require(sec, key),
                        origin_ + " [" + std::string(sec) + "] " + std::string(key));
}

std::optional<double> IniDoc::get_number(std::string_view sec, std::string_view key) const {
    auto v = get(sec, key);
    if (!v) return std::nullopt;
    return parse_number(*v, origin_ + " [" + std::string(sec) + "] " + std::string(key));
}

std::vector<std::string> IniDoc::get_list(std::string_view sec, std::string_view key) const {
    std::vector<std::string> out;
    const IniSection* s = section(sec);
    if (!s) return out;
    for (const IniEntry& e : s->entries) {
        if (e.key != key) continue;
        for (std::string& tok : split_tokens(e.value)) out.push_back(std::move(tok));
    }
    return out;
}

std::vector<std::string> split_tokens(std::string_view value) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < value.size()) {
        while (i < value.size() &&
               (value[i] == ' ' || value[i] == '\t' || value[i] == ','))
            ++i;
        std::size_t start = i;
        while (i < value.size() && value[i] != ' ' && value[i] != '\t' && value[i] != ',') ++i;
        if (i > start) out.emplace_back(value.substr(start, i - start));
    }
    return out;
}

double parse_number(std::string_view s, const std::string& context) {
    std::string buf(s);
    errno = 0;
    char* end = nullptr;
    double v = std::strtod(buf.c_str(), &end);
    if (errno != 0 || end != buf.c_str() + buf.size() || buf.empty())
        throw Error(Errc::config_error, context + ": bad number '" + buf + "'");
    return v;
}

long long parse_integer(std::string_view s, const std::string& context) {
    std::string buf(s);
    errno = 0;
    char* end = nullptr;
    long long v = std::strtoll(buf.c_str(), &end, 10);
    if (errno != 0 || end != buf.c_str() + buf.size() || buf.empty())
        throw Error(Errc::config_error, context + ": bad integer '" + buf + "'");
    return v;
}

}  // namespace prevbound
