#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "rbis/errors.hpp"
#include "rbis/version.hpp"

namespace rbis {

inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (const unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string fnv1a64_hex(std::string_view bytes) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(bytes)));
    return buf;
}

/// Provenance record for one run: which config bytes were consumed, with
/// which seed, by which tool version. Written before any result file.
struct RunManifest {
    std::string command;
    std::string config_path;
    std::string config_fnv1a64;
    std::uint64_t seed = 0;
    std::string out_dir;
};

/// Writes manifest.json atomically (temp file + rename).
inline void write_manifest(const std::filesystem::path& out_dir, const RunManifest& manifest) {
    nlohmann::json j;
    j["tool"] = "rbissim";
    j["version"] = std::string(kVersion);
    j["command"] = manifest.command;
    j["config_path"] = manifest.config_path;
    j["config_fnv1a64"] = manifest.config_fnv1a64;
    j["seed"] = manifest.seed;
    j["out_dir"] = manifest.out_dir;

    const std::filesystem::path final_path = out_dir / "manifest.json";
    const std::filesystem::path tmp_path = out_dir / "manifest.json.tmp";
    {
        std::ofstream out(tmp_path, std::ios::binary | std::ios::trunc);
        if (!out)
            throw ConfigError("cannot open " + tmp_path.string() + " for writing");
        out << j.dump(2) << '\n';
    }
    std::filesystem::rename(tmp_path, final_path);
}

} // namespace rbis
