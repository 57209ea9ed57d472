#include "pslab/prime_engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <thread>

#include "pslab/error.hpp"

namespace pslab {

namespace {

std::vector<u64> simple_sieve(u64 limit) {
    std::vector<bool> composite(limit + 1, false);
    std::vector<u64> out;
    for (u64 i = 2; i <= limit; ++i) {
        if (composite[i]) continue;
        out.push_back(i);
        for (u64 j = i * i; j <= limit; j += i) composite[j] = true;
    }
    return out;
}

const std::vector<u64>& trial_primes() {
    // Cube root of the factorisation limit: any cofactor left after trial
    // division has at most two prime factors.
    static const std::vector<u64> primes = simple_sieve(10'000);
    return primes;
}

inline void set_bit(std::vector<u64>& bits, u64 n) { bits[n >> 6] |= u64{1} << (n & 63); }
inline void clear_bit(std::vector<u64>& bits, u64 n) { bits[n >> 6] &= ~(u64{1} << (n & 63)); }

bool miller_rabin_round(u64 n, u64 a, u64 d, unsigned s) {
    u64 x = powmod(a, d, n);
    if (x == 1 || x == n - 1) return true;
    for (unsigned r = 1; r < s; ++r) {
        x = mulmod(x, x, n);
        if (x == n - 1) return true;
    }
    return false;
}

u64 pollard_brent(u64 n, std::mt19937_64& rng) {
    if (n % 2 == 0) return 2;
    std::uniform_int_distribution<u64> dist(1, n - 1);
    while (true) {
        u64 y = dist(rng);
        const u64 c = dist(rng);
        const u64 m = 128;
        u64 g = 1, r = 1, q = 1, x = 0, ys = 0;
        auto f = [&](u64 v) { return (mulmod(v, v, n) + c) % n; };
        while (g == 1) {
            x = y;
            for (u64 i = 0; i < r; ++i) y = f(y);
            u64 k = 0;
            while (k < r && g == 1) {
                ys = y;
                const u64 lim = std::min(m, r - k);
                for (u64 i = 0; i < lim; ++i) {
                    y = f(y);
                    q = mulmod(q, x > y ? x - y : y - x, n);
                }
                g = std::gcd(q, n);
                k += m;
            }
            r *= 2;
        }
        if (g == n) {
            do {
                ys = f(ys);
                g = std::gcd(x > ys ? x - ys : ys - x, n);
            } while (g == 1);
        }
        if (g != n) return g;
    }
}

void push_factor(std::vector<PrimePower>& out, u64 p, unsigned e) {
    for (auto& f : out) {
        if (f.prime == p) {
            f.exponent += e;
            return;
        }
    }
    out.push_back({p, e});
}

}  // namespace

bool is_prime(u64 n) noexcept {
    if (n < 2) return false;
    for (u64 p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (n % p == 0) return n == p;
    }
    u64 d = n - 1;
    unsigned s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    // Prime bases up to 37 are deterministic below 3.18e23, which covers u64.
    for (u64 a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (!miller_rabin_round(n, a, d, s)) return false;
    }
    return true;
}

bool PrimeTable::is_prime(u64 n) const {
    if (n <= limit_) return (bits_[n >> 6] >> (n & 63)) & 1;
    return pslab::is_prime(n);
}

u64 PrimeTable::smallest_factor(u64 n) const {
    if (n < 2 || n > limit_ || spf_.empty()) {
        fail(ErrorKind::invalid_argument, "smallest_factor: n outside table or table built without factors");
    }
    return spf_[n];
}

void PrimeTable::collect_primes() {
    primes_.clear();
    for (std::size_t w = 0; w < bits_.size(); ++w) {
        u64 word = bits_[w];
        while (word) {
            const u64 n = (static_cast<u64>(w) << 6) + static_cast<u64>(std::countr_zero(word));
            if (n <= limit_) primes_.push_back(n);
            word &= word - 1;
        }
    }
}

PrimeTable build_prime_table(u64 limit, const PrimeTableOptions& opts) {
    if (limit < 2) fail(ErrorKind::invalid_argument, "build_prime_table: limit must be >= 2");
    if (limit > (u64{1} << 40)) fail(ErrorKind::resource_limit, "build_prime_table: limit above 2^40 is not supported");
    if (opts.smallest_factor && limit > 0xFFFFFFFFULL) {
        fail(ErrorKind::resource_limit, "build_prime_table: smallest-factor table limited to 2^32");
    }

    PrimeTable table;
    table.limit_ = limit;
    const u64 words = (limit >> 6) + 1;
    table.bits_.assign(words, 0);

    const u64 root = isqrt(limit);
    const std::vector<u64> base = simple_sieve(std::max<u64>(root, 2));

    // Segments are whole words so workers never share a word.
    const u64 seg_words = std::max<u64>(1, (std::max<u64>(opts.segment_size, 64) + 63) / 64);
    const u64 segments = (words + seg_words - 1) / seg_words;

    auto sieve_segment = [&](u64 seg) {
        const u64 w_lo = seg * seg_words;
        const u64 w_hi = std::min(words, w_lo + seg_words);
        std::fill(table.bits_.begin() + static_cast<std::ptrdiff_t>(w_lo),
                  table.bits_.begin() + static_cast<std::ptrdiff_t>(w_hi), ~u64{0});
        const u64 lo = w_lo << 6;
        const u64 hi = std::min<u64>((w_hi << 6) - 1, limit);
        for (u64 p : base) {
            if (p * p > hi) break;
            u64 start = std::max(p * p, (lo + p - 1) / p * p);
            for (u64 j = start; j <= hi; j += p) clear_bit(table.bits_, j);
        }
        if (lo == 0) {
            clear_bit(table.bits_, 0);
            clear_bit(table.bits_, 1);
        }
        // Clear padding bits past limit in the final word.
        if (w_hi == words) {
            for (u64 n = limit + 1; n < (words << 6); ++n) clear_bit(table.bits_, n);
        }
    };

    const unsigned workers = std::max(1u, std::min<unsigned>(opts.workers, static_cast<unsigned>(segments)));
    if (workers == 1) {
        for (u64 s = 0; s < segments; ++s) sieve_segment(s);
    } else {
        std::atomic<u64> next{0};
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (u64 s = next++; s < segments; s = next++) sieve_segment(s);
            });
        }
        for (auto& t : pool) t.join();
    }
    table.collect_primes();

    if (opts.smallest_factor) {
        table.spf_.assign(limit + 1, 0);
        for (u64 p : table.primes_) {
            if (table.spf_[p] != 0) continue;
            for (u64 j = p; j <= limit; j += p) {
                if (table.spf_[j] == 0) table.spf_[j] = static_cast<std::uint32_t>(p);
            }
        }
    }
    return table;
}

void save_prime_table(const PrimeTable& table, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::io_error, "cannot write prime cache " + path.string());
    auto put_le = [&](u64 v, int bytes) {
        for (int i = 0; i < bytes; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xFF));
    };
    out.write("PSLB", 4);
    put_le(kPrimeCacheVersion, 4);
    put_le(table.limit(), 8);
    const u64 nbytes = table.limit() / 8 + 1;
    for (u64 b = 0; b < nbytes; ++b) {
        out.put(static_cast<char>((table.bits()[b / 8] >> (8 * (b % 8))) & 0xFF));
    }
    if (!out) fail(ErrorKind::io_error, "short write on prime cache " + path.string());
}

PrimeTable load_prime_table(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::io_error, "cannot open prime cache " + path.string());
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "PSLB", 4) != 0) fail(ErrorKind::format_error, "bad prime cache magic");
    auto get_le = [&](int bytes) {
        u64 v = 0;
        for (int i = 0; i < bytes; ++i) {
            const int c = in.get();
            if (c == EOF) fail(ErrorKind::format_error, "truncated prime cache");
            v |= static_cast<u64>(static_cast<unsigned char>(c)) << (8 * i);
        }
        return v;
    };
    if (get_le(4) != kPrimeCacheVersion) fail(ErrorKind::format_error, "prime cache version mismatch");
    PrimeTable table;
    table.limit_ = get_le(8);
    if (table.limit_ < 2) fail(ErrorKind::format_error, "prime cache limit out of range");
    table.bits_.assign((table.limit_ >> 6) + 1, 0);
    const u64 nbytes = table.limit_ / 8 + 1;
    for (u64 b = 0; b < nbytes; ++b) table.bits_[b / 8] |= get_le(1) << (8 * (b % 8));
    table.collect_primes();
    return table;
}

Factorization::Factorization(std::vector<PrimePower> factors) : factors_(std::move(factors)) {
    std::sort(factors_.begin(), factors_.end(), [](auto& a, auto& b) { return a.prime < b.prime; });
}

u64 Factorization::value() const {
    u64 v = 1;
    for (const auto& f : factors_) {
        for (unsigned e = 0; e < f.exponent; ++e) v *= f.prime;
    }
    return v;
}

unsigned Factorization::big_omega() const noexcept {
    unsigned s = 0;
    for (const auto& f : factors_) s += f.exponent;
    return s;
}

bool Factorization::squarefree() const noexcept {
    return std::all_of(factors_.begin(), factors_.end(), [](auto& f) { return f.exponent == 1; });
}

u64 Factorization::divisor_count() const noexcept {
    u64 d = 1;
    for (const auto& f : factors_) d *= f.exponent + 1;
    return d;
}

Factorization factorize(u64 n, const PrimeTable* table) {
    if (n == 0) fail(ErrorKind::invalid_argument, "factorize: n must be >= 1");
    if (n > kFactorizeLimit) fail(ErrorKind::unsupported_range, "factorize: n above 1e12");

    std::vector<PrimePower> out;
    if (table && table->has_smallest_factor() && n <= table->limit()) {
        while (n > 1) {
            const u64 p = table->smallest_factor(n);
            unsigned e = 0;
            while (n % p == 0) {
                n /= p;
                ++e;
            }
            out.push_back({p, e});
        }
        return Factorization(std::move(out));
    }

    for (u64 p : trial_primes()) {
        if (p * p > n) break;
        if (n % p) continue;
        unsigned e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        out.push_back({p, e});
    }
    if (n > 1) {
        if (is_prime(n)) {
            push_factor(out, n, 1);
        } else if (is_square(n)) {
            push_factor(out, isqrt(n), 2);
        } else {
            // n has no factor <= 1e4 and n <= 1e12, so n = a * b with a, b prime.
            std::mt19937_64 rng(0x5eed5eedULL);
            const u64 a = pollard_brent(n, rng);
            push_factor(out, a, 1);
            push_factor(out, n / a, 1);
        }
    }
    return Factorization(std::move(out));
}

u64 largest_prime_factor(u64 n, const PrimeTable* table) {
    const Factorization f = factorize(n, table);
    return f.empty() ? 1 : f.factors().back().prime;
}

std::vector<u64> primes_in_class(u64 limit, u64 residue, u64 modulus) {
    if (modulus < 1 || residue >= modulus) {
        fail(ErrorKind::invalid_argument, "primes_in_class: need 0 <= residue < modulus");
    }
    std::vector<u64> out;
    if (limit < 2) return out;
    const PrimeTable table = build_prime_table(limit);
    for (u64 p : table.primes()) {
        if (p % modulus == residue) out.push_back(p);
    }
    return out;
}

u64 nth_prime_upper_bound(u64 n) {
    if (n < 6) return 13;
    const double x = static_cast<double>(n);
    return static_cast<u64>(x * (std::log(x) + std::log(std::log(x)))) + 1;
}

}  // namespace pslab
