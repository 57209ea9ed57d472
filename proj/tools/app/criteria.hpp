#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pslab/arith.hpp"

namespace pslab::app {

struct CriterionResult {
    std::string id;
    std::string title;
    bool passed = false;
    bool soft = false;     // reported, never counted as a failure
    bool skipped = false;  // left out by quick mode
    std::string detail;
    double seconds = 0;
    double budget_seconds = 0;
};

struct CriteriaOptions {
    unsigned threads = 1;
    u64 seed = 1;
    bool quick = false;
    std::optional<std::filesystem::path> cache_dir;
    std::function<void(const CriterionResult&)> on_result;
};

std::vector<CriterionResult> run_criteria(const CriteriaOptions& options);

std::string format_result_line(const CriterionResult& result);

// True when no hard, non-skipped criterion failed.
bool all_hard_passed(const std::vector<CriterionResult>& results);

}  // namespace pslab::app
