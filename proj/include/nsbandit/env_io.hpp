#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "nsbandit/assumptions.hpp"
#include "nsbandit/environment.hpp"

namespace nsbandit {

inline constexpr int kEnvSchemaVersion = 1;

/// Versioned document: schema_version, K, T, mode, noise, per-arm segment
/// lists and optional generator metadata. Doubles are written in shortest
/// round-trip form, so to_json/from_json is bit-exact.
nlohmann::json to_json(const EnvironmentSpec& env);
EnvironmentSpec environment_from_json(const nlohmann::json& doc);

EnvironmentSpec load_environment(const std::filesystem::path& path);
void save_environment(const EnvironmentSpec& env, const std::filesystem::path& path);

/// FNV-1a over the canonical JSON dump; identifies the environment in traces.
std::uint64_t environment_hash(const EnvironmentSpec& env);

ObservationMode parse_mode(const std::string& text);
NoiseKind parse_noise_kind(const std::string& text);

/// M, ok, change points and the failing (arm, interval) entries; `full`
/// adds every evidence record.
nlohmann::json to_json(const PartitionReport& report, bool full = false);

/// Writes through a sibling temporary file and renames it into place.
void write_file_atomically(const std::filesystem::path& path, const std::string& contents);

}  // namespace nsbandit
