#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

#include "config.hpp"

namespace pslab::app {

std::string sha256_hex(const std::filesystem::path& path);

// Collects the data files of one command run and writes manifest.json.
class ReportBundle {
public:
    ReportBundle(const RunConfig& config);

    // Writes content to output_dir/name and records it.
    void write_file(const std::string& name, const std::string& content);
    void add_note(const std::string& note) { notes_.push_back(note); }

    const std::vector<std::string>& files() const noexcept { return files_; }

    // Writes manifest.json; returns its path.
    std::filesystem::path finish();

private:
    RunConfig config_;
    std::chrono::steady_clock::time_point start_;
    std::vector<std::string> files_;
    std::vector<std::string> notes_;
};

}  // namespace pslab::app
