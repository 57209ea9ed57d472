#include "manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <json.hpp>

#include "pslab/error.hpp"
#include "pslab/moment_lab.hpp"
#include "pslab/prime_engine.hpp"

#ifndef PSLAB_VERSION
#define PSLAB_VERSION "0.0.0"
#endif

namespace pslab::app {

std::string sha256_hex(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::io_error, "cannot read " + path.string());
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, md.data(), &len);
    EVP_MD_CTX_free(ctx);
    std::string hex;
    for (unsigned i = 0; i < len; ++i) {
        char b[3];
        std::snprintf(b, sizeof b, "%02x", md[i]);
        hex += b;
    }
    return hex;
}

ReportBundle::ReportBundle(const RunConfig& config) : config_(config), start_(std::chrono::steady_clock::now()) {
    std::error_code ec;
    std::filesystem::create_directories(config_.output_dir, ec);
    if (ec) fail(ErrorKind::io_error, "cannot create output directory " + config_.output_dir.string() + ": " + ec.message());
}

void ReportBundle::write_file(const std::string& name, const std::string& content) {
    const auto path = config_.output_dir / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    out.close();
    if (!out) fail(ErrorKind::io_error, "cannot write " + path.string());
    files_.push_back(name);
}

std::filesystem::path ReportBundle::finish() {
    using nlohmann::json;
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();

    json cfg;
    cfg["x"] = config_.x;
    cfg["kmax"] = config_.k_max;
    cfg["cutoff"] = config_.cutoff;
    cfg["threads"] = config_.threads;
    cfg["cache_dir"] = config_.cache_dir ? json(config_.cache_dir->string()) : json(nullptr);
    cfg["out"] = config_.output_dir.string();
    cfg["seed"] = config_.seed;
    cfg["quick"] = config_.quick;
    cfg["corpus"] = config_.corpus ? json(config_.corpus->string()) : json(nullptr);

    json files = json::array();
    for (const auto& name : files_) {
        const auto path = config_.output_dir / name;
        files.push_back({{"name", name}, {"bytes", std::filesystem::file_size(path)}, {"sha256", sha256_hex(path)}});
    }

    json m;
    m["command"] = config_.command;
    m["config"] = cfg;
    m["seed"] = config_.seed;
    m["versions"] = {{"pslab", PSLAB_VERSION},
                     {"map_format", kMapFormatVersion},
                     {"prime_cache_format", kPrimeCacheVersion},
                     {"compiler", __VERSION__}};
    m["wall_time_seconds"] = wall;
    m["files"] = files;
    m["notes"] = notes_;

    const auto path = config_.output_dir / "manifest.json";
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << m.dump(2) << '\n';
    if (!out) fail(ErrorKind::io_error, "cannot write " + path.string());
    return path;
}

}  // namespace pslab::app
