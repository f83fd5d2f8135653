#include "indecide/manifest.hpp"

#include <fstream>
#include <iterator>
#include <sstream>

#include <openssl/evp.h>

#include "indecide/errors.hpp"
#include "indecide/report_io.hpp"

namespace indecide {

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error("sha256: digest failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 15];
    }
    return out;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("cannot open '" + path.string() + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string RunManifest::input_hash() const {
    std::string buf = "config\n" + effective_config + '\n';
    for (const auto& p : inputs) {
        const std::string body = read_file(p);
        buf += p.filename().string() + '\n' + std::to_string(body.size()) + '\n' + body;
    }
    return sha256_hex(buf);
}

std::filesystem::path RunManifest::write(const std::filesystem::path& dir) const {
    KeyValueDoc d;
    d.set("format_version", std::to_string(kDocumentVersion));
    d.set("toolkit_version", kToolkitVersion);
    d.set("subcommand", subcommand);
    d.set("config_path", config_path.empty() ? "-" : config_path);
    d.set("effective_config", effective_config);
    d.set("seed", seed.empty() ? "-" : seed);
    for (std::size_t i = 0; i < inputs.size(); ++i) d.set("input." + std::to_string(i + 1), inputs[i].string());
    for (std::size_t i = 0; i < outputs.size(); ++i)
        d.set("output." + std::to_string(i + 1), outputs[i].filename().string());
    d.set("input_sha256", input_hash());
    const auto path = dir / "manifest.txt";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SchemaError("cannot write '" + path.string() + "'");
    d.write(out, "indecide run manifest");
    return path;
}

}  // namespace indecide
