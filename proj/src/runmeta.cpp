#include "floodsar/runmeta.hpp"

#include <openssl/evp.h>

#include "floodsar/csv.hpp"
#include "floodsar/errors.hpp"

namespace floodsar {

std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr))
        throw Error("sha256 computation failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(size_t(len) * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xF]);
    }
    return out;
}

std::string sha256_file(const std::string& path) { return sha256_hex(read_file_bytes(path)); }

void RunManifest::write(const std::string& path) const {
    std::vector<std::pair<std::string, std::string>> kv;
    kv.emplace_back("command", command);
    kv.emplace_back("version", kToolVersion);
    for (const auto& [k, v] : config) kv.emplace_back("config." + k, v);
    for (size_t i = 0; i < inputs.size(); ++i) {
        kv.emplace_back("input." + std::to_string(i) + ".path", inputs[i]);
        kv.emplace_back("input." + std::to_string(i) + ".sha256", sha256_file(inputs[i]));
    }
    for (size_t i = 0; i < outputs.size(); ++i) {
        kv.emplace_back("output." + std::to_string(i) + ".path", outputs[i]);
        kv.emplace_back("output." + std::to_string(i) + ".sha256", sha256_file(outputs[i]));
    }
    kv.emplace_back("wall_ms", std::to_string(wall_ms));
    write_kv(path, kv);
}

}  // namespace floodsar
