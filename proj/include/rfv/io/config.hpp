#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace rfv {

// Flat key = value text: one pair per line, '#' starts a comment line, blank
// lines ignored. Keys are unique. Reads are tracked so a run can reject keys
// it never understood instead of silently ignoring typos.
class KeyValueConfig {
  public:
    static KeyValueConfig from_file(const std::string& path);
    static KeyValueConfig from_text(const std::string& text);

    bool has(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<double> get_grid(const std::string& key,
                                 const std::string& fallback_text) const;

    // Throws ConfigError naming every key that was present but never read.
    void ensure_all_consumed() const;

  private:
    const std::string* find(const std::string& key) const;
    std::vector<std::pair<std::string, std::string>> entries_;
    mutable std::set<std::string> consumed_;
};

// "1,2,3" | "linspace:lo:hi:count" | "logspace:lo:hi:count" (geometric,
// endpoints positive).
std::vector<double> parse_grid(const std::string& text);

double parse_double(const std::string& text, const std::string& what);
std::uint64_t parse_u64(const std::string& text, const std::string& what);

}  // namespace rfv
