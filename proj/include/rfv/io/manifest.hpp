#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace rfv {

inline constexpr const char* kToolName = "rfvar";
inline constexpr const char* kToolVersion = "1.0.0";

struct ManifestEntry {
    std::string filename;
    std::string digest;  // "fnv1a64:<16 hex digits>"
};

std::string digest_hex(const std::string& content);
std::string iso8601_utc_now();

// Creates parent directories as needed.
void write_text_file(const std::string& path, const std::string& content);

// JSON document with keys: version, command, config, seed, timestamp, digests.
std::string manifest_json(const std::string& command,
                          const std::vector<std::pair<std::string, std::string>>& config_kv,
                          std::uint64_t seed, const std::vector<ManifestEntry>& outputs);

}  // namespace rfv
