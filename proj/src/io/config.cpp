#include "rfv/io/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "rfv/errors.hpp"

namespace rfv {
namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string::size_type start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        if (pos == std::string::npos) {
            parts.push_back(s.substr(start));
            return parts;
        }
        parts.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

}  // namespace

double parse_double(const std::string& text, const std::string& what) {
    const std::string t = trim(text);
    if (t.empty()) throw ConfigError(what + ": empty number");
    errno = 0;
    char* end = nullptr;
    const double value = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size() || errno == ERANGE)
        throw ConfigError(what + ": cannot parse '" + t + "' as a number");
    return value;
}

std::uint64_t parse_u64(const std::string& text, const std::string& what) {
    const std::string t = trim(text);
    if (t.empty() || t[0] == '-')
        throw ConfigError(what + ": cannot parse '" + t + "' as an unsigned integer");
    errno = 0;
    char* end = nullptr;
    const unsigned long long value = std::strtoull(t.c_str(), &end, 10);
    if (end != t.c_str() + t.size() || errno == ERANGE)
        throw ConfigError(what + ": cannot parse '" + t + "' as an unsigned integer");
    return std::uint64_t(value);
}

std::vector<double> parse_grid(const std::string& text) {
    const std::string t = trim(text);
    const bool lin_scale = t.rfind("linspace:", 0) == 0;
    const bool log_scale = t.rfind("logspace:", 0) == 0;
    if (lin_scale || log_scale) {
        const std::vector<std::string> parts = split(t, ':');
        if (parts.size() != 4)
            throw ConfigError("grid '" + t + "': expected <kind>:lo:hi:count");
        const double lo = parse_double(parts[1], "grid lo");
        const double hi = parse_double(parts[2], "grid hi");
        const std::uint64_t count = parse_u64(parts[3], "grid count");
        if (count < 1) throw ConfigError("grid '" + t + "': count must be positive");
        if (count == 1) {
            if (lo != hi) throw ConfigError("grid '" + t + "': single point needs lo == hi");
            return {lo};
        }
        if (log_scale && (!(lo > 0.0) || !(hi > 0.0)))
            throw ConfigError("grid '" + t + "': logspace endpoints must be positive");
        std::vector<double> grid(count);
        for (std::uint64_t i = 0; i < count; ++i) {
            const double frac = double(i) / double(count - 1);
            grid[i] = log_scale ? lo * std::pow(hi / lo, frac) : lo + (hi - lo) * frac;
        }
        grid.front() = lo;
        grid.back() = hi;
        return grid;
    }

    std::vector<double> grid;
    for (const std::string& part : split(t, ','))
        grid.push_back(parse_double(part, "grid entry"));
    if (grid.empty()) throw ConfigError("grid '" + t + "' is empty");
    return grid;
}

KeyValueConfig KeyValueConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return from_text(buffer.str());
}

KeyValueConfig KeyValueConfig::from_text(const std::string& text) {
    KeyValueConfig config;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": expected key = value, got '" + t + "'");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
        if (config.find(key))
            throw ConfigError("config key '" + key + "' appears twice");
        config.entries_.emplace_back(key, value);
    }
    return config;
}

const std::string* KeyValueConfig::find(const std::string& key) const {
    for (const auto& entry : entries_)
        if (entry.first == key) {
            consumed_.insert(key);
            return &entry.second;
        }
    return nullptr;
}

bool KeyValueConfig::has(const std::string& key) const { return find(key) != nullptr; }

std::string KeyValueConfig::get_string(const std::string& key,
                                       const std::string& fallback) const {
    const std::string* value = find(key);
    return value ? *value : fallback;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
    const std::string* value = find(key);
    return value ? parse_double(*value, "key '" + key + "'") : fallback;
}

int KeyValueConfig::get_int(const std::string& key, int fallback) const {
    const std::string* value = find(key);
    if (!value) return fallback;
    const double d = parse_double(*value, "key '" + key + "'");
    const int i = int(d);
    if (double(i) != d)
        throw ConfigError("key '" + key + "': expected an integer, got '" + *value + "'");
    return i;
}

std::uint64_t KeyValueConfig::get_u64(const std::string& key,
                                      std::uint64_t fallback) const {
    const std::string* value = find(key);
    return value ? parse_u64(*value, "key '" + key + "'") : fallback;
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
    const std::string* value = find(key);
    if (!value) return fallback;
    if (*value == "true" || *value == "1" || *value == "yes") return true;
    if (*value == "false" || *value == "0" || *value == "no") return false;
    throw ConfigError("key '" + key + "': expected a boolean, got '" + *value + "'");
}

std::vector<double> KeyValueConfig::get_grid(const std::string& key,
                                             const std::string& fallback_text) const {
    const std::string* value = find(key);
    return parse_grid(value ? *value : fallback_text);
}

void KeyValueConfig::ensure_all_consumed() const {
    std::string unknown;
    for (const auto& entry : entries_)
        if (!consumed_.count(entry.first)) {
            if (!unknown.empty()) unknown += ", ";
            unknown += entry.first;
        }
    if (!unknown.empty()) throw ConfigError("unknown config keys: " + unknown);
}

}  // namespace rfv
