#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <thread>

namespace pslab::app {

namespace {

const char* const kKeys[] = {"x", "kmax", "cutoff", "threads", "cache-dir", "out", "seed", "quick", "corpus"};

bool known_key(const std::string& key) {
    return std::find(std::begin(kKeys), std::end(kKeys), key) != std::end(kKeys);
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

void apply(RunConfig& cfg, const Settings& layer, const char* origin) {
    for (const auto& [key, value] : layer) {
        try {
            if (key == "x") {
                cfg.x = parse_count(value);
            } else if (key == "kmax") {
                const u64 k = parse_count(value);
                if (k > 64) throw UsageError("kmax must be at most 64");
                cfg.k_max = static_cast<unsigned>(k);
            } else if (key == "cutoff") {
                cfg.cutoff = parse_count(value);
            } else if (key == "threads") {
                const u64 t = parse_count(value);
                if (t > 1024) throw UsageError("threads must be at most 1024");
                cfg.threads = static_cast<unsigned>(t);
            } else if (key == "cache-dir") {
                if (value.empty()) throw UsageError("empty path");
                cfg.cache_dir = value;
            } else if (key == "out") {
                if (value.empty()) throw UsageError("empty path");
                cfg.output_dir = value;
            } else if (key == "seed") {
                cfg.seed = parse_count(value);
            } else if (key == "quick") {
                cfg.quick = parse_bool(value);
            } else if (key == "corpus") {
                cfg.corpus = value;
            } else {
                throw UsageError("unknown setting");
            }
        } catch (const UsageError& e) {
            throw UsageError(std::string(origin) + " " + key + "=" + value + ": " + e.what());
        }
    }
}

}  // namespace

u64 parse_count(std::string_view text) {
    if (text.empty()) throw UsageError("empty number");
    const auto epos = text.find_first_of("eE");
    const std::string_view mant = text.substr(0, epos);
    const std::string_view expo = epos == std::string_view::npos ? std::string_view{} : text.substr(epos + 1);
    auto digits = [](std::string_view s) {
        return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
    };
    if (!digits(mant)) {
        if (mant.find('.') != std::string_view::npos) throw UsageError("fractional mantissa in '" + std::string(text) + "'");
        throw UsageError("not a non-negative integer: '" + std::string(text) + "'");
    }
    if (epos != std::string_view::npos && !digits(expo))
        throw UsageError("bad exponent in '" + std::string(text) + "'");

    constexpr u64 kMax = std::numeric_limits<u64>::max();
    u64 v = 0;
    for (char c : mant) {
        const u64 d = static_cast<u64>(c - '0');
        if (v > (kMax - d) / 10) throw UsageError("number out of range: '" + std::string(text) + "'");
        v = v * 10 + d;
    }
    u64 e = 0;
    for (char c : expo) {
        e = e * 10 + static_cast<u64>(c - '0');
        if (e > 100) throw UsageError("number out of range: '" + std::string(text) + "'");
    }
    for (u64 i = 0; i < e && v != 0; ++i) {
        if (v > kMax / 10) throw UsageError("number out of range: '" + std::string(text) + "'");
        v *= 10;
    }
    return v;
}

bool parse_bool(std::string_view text) {
    if (text == "1" || text == "true" || text == "yes" || text == "on") return true;
    if (text == "0" || text == "false" || text == "no" || text == "off") return false;
    throw UsageError("not a boolean: '" + std::string(text) + "'");
}

Settings read_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read config file " + path.string());
    Settings out;
    std::string line;
    for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        const std::string body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw UsageError(path.string() + ":" + std::to_string(lineno) + ": expected key=value");
        const std::string key = trim(std::string_view(body).substr(0, eq));
        const std::string value = trim(std::string_view(body).substr(eq + 1));
        if (!known_key(key)) throw UsageError(path.string() + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
        out[key] = value;
    }
    return out;
}

Settings read_environment() {
    Settings out;
    if (const char* v = std::getenv("PSLAB_CACHE_DIR"); v && *v) out["cache-dir"] = v;
    if (const char* v = std::getenv("PSLAB_THREADS"); v && *v) out["threads"] = v;
    return out;
}

RunConfig resolve_config(const std::string& command, const Settings& env, const Settings& file, const Settings& flags) {
    RunConfig cfg;
    cfg.command = command;
    cfg.threads = std::max(1u, std::thread::hardware_concurrency());
    apply(cfg, env, "environment");
    apply(cfg, file, "config file");
    apply(cfg, flags, "flag");
    if (cfg.x == 0) throw UsageError("--x must be positive");
    if (cfg.k_max == 0) throw UsageError("--kmax must be positive");
    if (cfg.cutoff == 0) throw UsageError("--cutoff must be positive");
    if (cfg.threads == 0) throw UsageError("--threads must be positive");
    if (cfg.seed == 0) throw UsageError("--seed must be positive");
    return cfg;
}

}  // namespace pslab::app
