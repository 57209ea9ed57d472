#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pslab/arith.hpp"

namespace pslab {

struct HeuristicConstants;

inline constexpr u64 kDefaultMemoryBudget = u64{4} << 30;

struct SweepConfig {
    u64 x = 0;
    u64 segment_span = 0;  // 0 picks a span from x
    unsigned worker_count = 1;
    std::optional<std::filesystem::path> cache_dir;
    u64 memory_budget = kDefaultMemoryBudget;
};

struct RepEntry {
    u64 n;
    std::uint32_t R2;
    bool is_2p2;
    friend bool operator==(const RepEntry&, const RepEntry&) = default;

    u64 r2() const noexcept { return 2 * u64{R2} + (is_2p2 ? 1 : 0); }
};

// Sparse n -> (R2(n), 1_{n = 2p^2}) over n <= x, sorted by n. Keys are
// exactly the n <= x with r2(n) > 0.
class RepMultiplicityMap {
public:
    RepMultiplicityMap() = default;
    RepMultiplicityMap(u64 x, std::vector<RepEntry> entries);

    u64 x() const noexcept { return x_; }
    const std::vector<RepEntry>& entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    // sum_n r2(n), the number of ordered prime pairs with p^2 + q^2 <= x.
    u64 total_pairs() const noexcept { return total_pairs_; }

    const RepEntry* find(u64 n) const noexcept;

    friend bool operator==(const RepMultiplicityMap&, const RepMultiplicityMap&) = default;

private:
    u64 x_ = 0;
    std::vector<RepEntry> entries_;
    u64 total_pairs_ = 0;
};

RepMultiplicityMap sweep_prime_pairs(const SweepConfig& config);

// Estimated bytes for a sweep at x; used for the resource guard.
u64 estimate_sweep_bytes(u64 x);

// "PSMM", u32 version, u64 x, u64 count, then (u64 n, u32 R2, u8 flags) records, LE.
inline constexpr std::uint32_t kMapFormatVersion = 1;
void write_map(const RepMultiplicityMap& map, std::ostream& out);
RepMultiplicityMap read_map(std::istream& in);
std::string serialize_map(const RepMultiplicityMap& map);

enum class CacheStatus { disabled, hit, miss, rebuilt };

struct CachedSweep {
    RepMultiplicityMap map;
    CacheStatus status = CacheStatus::disabled;
    std::filesystem::path path;
};

std::filesystem::path map_cache_path(const std::filesystem::path& dir, u64 x);

// Reads the map from config.cache_dir if present and valid, otherwise sweeps
// and writes it. Access is serialised with an advisory file lock.
CachedSweep load_or_sweep(const SweepConfig& config);

// Exact result of a moment fold; escalated records a fall back from the
// 128-bit accumulator to arbitrary precision.
struct ExactCount {
    BigInt value;
    bool escalated = false;
};

ExactCount raw_moment(const RepMultiplicityMap& map, unsigned k);      // sum r2^k
ExactCount power_sum_R2(const RepMultiplicityMap& map, unsigned k);    // sum R2^k
ExactCount falling_sum(const RepMultiplicityMap& map, unsigned k);     // S_k = k! sum C(R2, k)
ExactCount nondiagonal_count(const RepMultiplicityMap& map, unsigned k);

BigInt stirling2(unsigned n, unsigned k);
// sum_{l=1..k} {k l} S_l; falling[l-1] holds S_l.
BigInt stirling_convert(const std::vector<BigInt>& falling, unsigned k);

struct MassFunctionTable {
    u64 x = 0;
    std::map<u64, u64> rows;  // r -> N_r(x), r >= 1
};

MassFunctionTable mass_function(const RepMultiplicityMap& map);

// m -> #{n <= x : n in M, omega*(n) = m}.
std::map<unsigned, u64> count_M_by_omega(u64 x);

// sum_{n <= x} r0(n)^k / n at each requested x (ascending).
std::vector<double> log_average_r0(const std::vector<u64>& xs, unsigned k);

struct MomentRow {
    unsigned k = 0;
    BigInt raw;
    BigInt falling;
    std::optional<BigInt> nondiagonal;
    std::optional<double> predicted;
    std::optional<double> ratio;
};

struct MomentReport {
    u64 x = 0;
    std::vector<MomentRow> rows;
};

// Predicted main terms pi x / log^2 x, 2 pi x / log^2 x, 4 pi x / log^2 x for k = 1..3.
std::optional<double> predicted_moment(u64 x, unsigned k);

MomentReport build_moment_report(const RepMultiplicityMap& map, unsigned k_max, bool with_nondiagonal);

struct MassFunctionRow {
    u64 r = 0;
    u64 count = 0;
    std::optional<double> predicted;
    std::optional<double> ratio;
};

std::vector<MassFunctionRow> mass_function_rows(const MassFunctionTable& table, const HeuristicConstants& constants);

void write_moments_csv(const std::vector<MomentReport>& reports, std::ostream& out);
void write_massfn_csv(u64 x, const std::vector<MassFunctionRow>& rows, std::ostream& out);
void write_omega_csv(u64 x, const std::map<unsigned, u64>& counts, std::ostream& out);

std::string format_double(double v);

}  // namespace pslab
