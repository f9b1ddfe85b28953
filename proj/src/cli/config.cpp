#include "remlab/cli/config.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

namespace remlab::cli {

namespace {

std::string trim(const std::string& s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

bool given(const std::vector<std::string>& args, const std::string& key)
{
    const std::string flag = "--" + key;
    return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
        return a == flag || a.rfind(flag + "=", 0) == 0;
    });
}

}  // namespace

std::map<std::string, std::string> read_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open config file " + path.string());
    }
    std::map<std::string, std::string> out;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const std::string body = trim(line);
        if (body.empty() || body.front() == '#') {
            continue;
        }
        const auto eq = body.find('=');
        const std::string key = eq == std::string::npos ? std::string() : trim(body.substr(0, eq));
        if (key.empty()) {
            throw std::runtime_error(path.string() + ":" + std::to_string(number)
                                     + ": expected key = value");
        }
        if (key == "config") {
            throw std::runtime_error(path.string() + ":" + std::to_string(number)
                                     + ": config files cannot include other config files");
        }
        out[key] = trim(body.substr(eq + 1));
    }
    return out;
}

std::vector<std::string> merge_config(std::vector<std::string> args,
                                      const std::map<std::string, std::string>& config)
{
    for (const auto& [key, value] : config) {
        if (!given(args, key)) {
            args.push_back("--" + key);
            args.push_back(value);
        }
    }
    return args;
}

std::string find_config_path(const std::vector<std::string>& args)
{
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            return args[i + 1];
        }
        if (args[i].rfind("--config=", 0) == 0) {
            return args[i].substr(9);
        }
    }
    return {};
}

}  // namespace remlab::cli
