#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace floodsar {

inline constexpr const char* kToolVersion = "0.1.0";

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::string& path);

// Flat key=value record of one CLI run: command, effective config, input and
// output digests. wall_ms is the only field that varies between identical
// runs.
struct RunManifest {
    std::string command;
    std::vector<std::pair<std::string, std::string>> config;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    long long wall_ms = 0;

    void write(const std::string& path) const;
};

}  // namespace floodsar
