#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "pslab/arith.hpp"

namespace pslab {

inline constexpr u64 kDefaultSegmentSize = u64{1} << 20;
inline constexpr u64 kFactorizeLimit = 1'000'000'000'000ULL;

struct PrimeTableOptions {
    u64 segment_size = kDefaultSegmentSize;
    unsigned workers = 1;
    bool smallest_factor = false;
};

// Immutable primality bitmap over [0, limit], optionally with a smallest
// prime factor table. Safe to share between threads once built.
class PrimeTable {
public:
    PrimeTable() = default;

    u64 limit() const noexcept { return limit_; }
    bool has_smallest_factor() const noexcept { return !spf_.empty(); }

    bool is_prime(u64 n) const;  // falls back to Miller-Rabin above limit
    u64 smallest_factor(u64 n) const;

    const std::vector<u64>& primes() const noexcept { return primes_; }
    std::size_t prime_count() const noexcept { return primes_.size(); }

    // 64-bit words; bit (n & 63) of word n >> 6 is set iff n is prime.
    std::span<const u64> bits() const noexcept { return bits_; }

    friend PrimeTable build_prime_table(u64 limit, const PrimeTableOptions& opts);
    friend PrimeTable load_prime_table(const std::filesystem::path& path);

private:
    void collect_primes();

    u64 limit_ = 0;
    std::vector<u64> bits_;
    std::vector<std::uint32_t> spf_;
    std::vector<u64> primes_;
};

PrimeTable build_prime_table(u64 limit, const PrimeTableOptions& opts = {});

// Binary cache: "PSLB", u32 version, u64 limit, packed primality bits (LE).
inline constexpr std::uint32_t kPrimeCacheVersion = 1;
void save_prime_table(const PrimeTable& table, const std::filesystem::path& path);
PrimeTable load_prime_table(const std::filesystem::path& path);

// Deterministic for all 64-bit n (fixed witness set).
bool is_prime(u64 n) noexcept;

struct PrimePower {
    u64 prime;
    unsigned exponent;
    friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

class Factorization {
public:
    Factorization() = default;
    explicit Factorization(std::vector<PrimePower> factors);

    const std::vector<PrimePower>& factors() const& noexcept { return factors_; }
    // By value on temporaries so range-for over factorize(n).factors() is safe.
    std::vector<PrimePower> factors() && noexcept { return std::move(factors_); }
    bool empty() const noexcept { return factors_.empty(); }

    u64 value() const;
    unsigned omega() const noexcept { return static_cast<unsigned>(factors_.size()); }
    unsigned big_omega() const noexcept;
    bool squarefree() const noexcept;
    u64 divisor_count() const noexcept;

    friend bool operator==(const Factorization&, const Factorization&) = default;

private:
    std::vector<PrimePower> factors_;
};

// n in [1, 1e12]; uses the table's smallest-factor data when n is covered.
Factorization factorize(u64 n, const PrimeTable* table = nullptr);

// P^+(n), with P^+(1) = 1.
u64 largest_prime_factor(u64 n, const PrimeTable* table = nullptr);

std::vector<u64> primes_in_class(u64 limit, u64 residue, u64 modulus);

// Upper bound on the n-th prime (n >= 1), good enough to size a sieve.
u64 nth_prime_upper_bound(u64 n);

}  // namespace pslab
