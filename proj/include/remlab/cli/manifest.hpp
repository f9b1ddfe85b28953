#pragma once

// Run manifests: enough metadata to audit and reproduce a run, plus SHA-256
// digests of every output file.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace remlab::cli {

inline constexpr const char* kToolVersion = "0.1.0";

struct PointStatus
{
    std::string point;
    bool ok = true;
    std::string message;
};

struct RunManifest
{
    std::string command;
    std::vector<std::string> command_line;
    std::uint64_t master_seed = 0;
    nlohmann::json grid = nlohmann::json::object();
    double seconds = 0.0;
    int workers = 1;
    std::vector<PointStatus> points;
    std::vector<std::filesystem::path> outputs;
};

/// Lowercase hex SHA-256 of the file contents.
std::string sha256_file(const std::filesystem::path& path);

nlohmann::json to_json(const RunManifest& manifest);

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest);

}  // namespace remlab::cli
