#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace indecide {

constexpr const char* kToolkitVersion = "0.1.0";

/// Lowercase hex SHA-256 of `bytes`.
std::string sha256_hex(const std::string& bytes);

struct RunManifest {
    std::string subcommand;
    std::string config_path;
    /// Canonical one-line form of the settings that determine the outputs.
    std::string effective_config;
    std::vector<std::filesystem::path> inputs;
    std::vector<std::filesystem::path> outputs;
    std::string seed;

    /// Hash over the effective config and every input file's name and bytes.
    std::string input_hash() const;
    /// Writes `manifest.txt` into `dir`, replacing any previous one.
    std::filesystem::path write(const std::filesystem::path& dir) const;
};

/// Whole file as bytes; throws SchemaError when unreadable.
std::string read_file(const std::filesystem::path& path);

}  // namespace indecide
