#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "pslab/arith.hpp"

namespace pslab::app {

// Bad command line or config input; maps to exit status 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Parses "1000000", "1e9", "25E2" as exact integers. Fractional mantissas,
// signs and negative exponents are rejected.
u64 parse_count(std::string_view text);

bool parse_bool(std::string_view text);

struct RunConfig {
    std::string command;
    u64 x = 1'000'000;
    unsigned k_max = 6;
    u64 cutoff = 1'000'000;
    unsigned threads = 1;
    std::optional<std::filesystem::path> cache_dir;
    std::filesystem::path output_dir = "pslab-out";
    u64 seed = 1;
    bool quick = false;
    std::optional<std::filesystem::path> corpus;
};

// Raw key -> value settings from one configuration layer.
using Settings = std::map<std::string, std::string>;

Settings read_config_file(const std::filesystem::path& path);
Settings read_environment();

// Applies defaults, then env, then config file, then flags.
RunConfig resolve_config(const std::string& command, const Settings& env, const Settings& file, const Settings& flags);

}  // namespace pslab::app
