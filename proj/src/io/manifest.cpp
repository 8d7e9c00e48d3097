#include "rfv/io/manifest.hpp"

#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "rfv/errors.hpp"
#include "rfv/stats.hpp"

namespace rfv {

std::string digest_hex(const std::string& content) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx",
                  static_cast<unsigned long long>(fnv1a64(content)));
    return buf;
}

std::string iso8601_utc_now() {
    const std::time_t now = std::time(nullptr);
    std::tm parts{};
    gmtime_r(&now, &parts);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &parts);
    return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
    const std::filesystem::path p(path);
    std::error_code ec;
    if (p.has_parent_path()) {
        std::filesystem::create_directories(p.parent_path(), ec);
        if (ec)
            throw UsageError("cannot create directory '" + p.parent_path().string() +
                             "': " + ec.message());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw UsageError("cannot open '" + path + "' for writing");
    out << content;
    out.flush();
    if (!out) throw UsageError("failed writing '" + path + "'");
}

std::string manifest_json(const std::string& command,
                          const std::vector<std::pair<std::string, std::string>>& config_kv,
                          std::uint64_t seed, const std::vector<ManifestEntry>& outputs) {
    nlohmann::ordered_json doc;
    doc["version"] = std::string(kToolName) + " " + kToolVersion;
    doc["command"] = command;
    nlohmann::ordered_json config = nlohmann::ordered_json::object();
    for (const auto& kv : config_kv) config[kv.first] = kv.second;
    doc["config"] = config;
    doc["seed"] = seed;
    doc["timestamp"] = iso8601_utc_now();
    nlohmann::ordered_json digests = nlohmann::ordered_json::object();
    for (const ManifestEntry& entry : outputs) digests[entry.filename] = entry.digest;
    doc["digests"] = digests;
    return doc.dump(2) + "\n";
}

}  // namespace rfv
