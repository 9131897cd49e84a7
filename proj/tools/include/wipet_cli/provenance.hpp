#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

namespace wipet::cli {

/// Hex SHA-256 of `text`.
std::string sha256_hex(const std::string& text);

/// Writes `<file>.prov.json` next to an output: tool version, command,
/// config hash and seed.
void write_provenance(const std::filesystem::path& file, const std::string& command, const std::string& config_hash,
                      std::uint64_t seed);

}  // namespace wipet::cli
