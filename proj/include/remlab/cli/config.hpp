#pragma once

// Flat key=value configuration files. Lines are `key = value`; blank lines
// and lines starting with '#' are ignored. Keys name long flags without the
// leading dashes.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace remlab::cli {

/// Throws std::runtime_error naming the file and line on malformed input.
std::map<std::string, std::string> read_config(const std::filesystem::path& path);

/// Appends `--key value` for every configured key not already given on the
/// command line, so explicit flags take precedence.
std::vector<std::string> merge_config(std::vector<std::string> args,
                                      const std::map<std::string, std::string>& config);

/// Value of `--config` in args (either `--config path` or `--config=path`).
std::string find_config_path(const std::vector<std::string>& args);

}  // namespace remlab::cli
