#include "remlab/cli/manifest.hpp"

#include <array>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>
#include <stdexcept>

#include <openssl/evp.h>

namespace remlab::cli {

std::string sha256_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read " + path.string() + " for hashing");
    }
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                                 &EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("SHA-256 initialization failed");
    }
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        if (in.gcount() > 0) {
            EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
        }
    }
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) {
        hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    }
    return hex.str();
}

nlohmann::json to_json(const RunManifest& m)
{
    nlohmann::json j;
    j["tool_version"] = kToolVersion;
    j["command"] = m.command;
    j["command_line"] = m.command_line;
    j["master_seed"] = m.master_seed;
    j["grid"] = m.grid;
    j["seconds"] = m.seconds;
    j["workers"] = m.workers;
    auto& pts = j["points"] = nlohmann::json::array();
    for (const auto& p : m.points) {
        pts.push_back({{"point", p.point}, {"ok", p.ok}, {"message", p.message}});
    }
    auto& digests = j["outputs"] = nlohmann::json::array();
    for (const auto& path : m.outputs) {
        digests.push_back({{"path", path.string()}, {"sha256", sha256_file(path)}});
    }
    return j;
}

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest)
{
    const nlohmann::json j = to_json(manifest);
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write manifest " + path.string());
    }
    out << j.dump(2) << '\n';
}

}  // namespace remlab::cli
