#include "pslab/moment_lab.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <locale>
#include <numbers>
#include <sstream>
#include <thread>

#include "factor_sieve.hpp"
#include "pslab/error.hpp"
#include "pslab/heuristics.hpp"
#include "pslab/prime_engine.hpp"

namespace pslab {

namespace {

BigInt to_big(u128 v) {
    BigInt r = static_cast<u64>(v >> 64);
    r <<= 64;
    r += static_cast<u64>(v);
    return r;
}

bool checked_mul(u128& acc, u128 factor) { return !__builtin_mul_overflow(acc, factor, &acc); }
bool checked_add(u128& acc, u128 term) { return !__builtin_add_overflow(acc, term, &acc); }

bool checked_pow(u128 base, unsigned k, u128& out) {
    out = 1;
    for (unsigned i = 0; i < k; ++i) {
        if (!checked_mul(out, base)) return false;
    }
    return true;
}

bool checked_falling(u128 n, unsigned k, u128& out) {
    out = 1;
    if (k > n) {
        out = 0;
        return true;
    }
    for (unsigned i = 0; i < k; ++i) {
        if (!checked_mul(out, n - i)) return false;
    }
    return true;
}

// Runs the 128-bit fold; on overflow (predicted or observed) reruns it with BigInt.
template <class Fast, class Big>
ExactCount fold(const RepMultiplicityMap& map, unsigned k, Fast fast, Big big) {
    u64 max_r2 = 1;
    for (const auto& e : map.entries()) max_r2 = std::max(max_r2, e.r2());
    const double predicted_bits =
        k * std::log2(static_cast<double>(max_r2) + 1.0) + std::log2(static_cast<double>(map.size()) + 1.0);
    if (predicted_bits < 126.0) {
        u128 acc = 0;
        bool ok = true;
        for (const auto& e : map.entries()) {
            u128 term;
            if (!fast(e, term) || !checked_add(acc, term)) {
                ok = false;
                break;
            }
        }
        if (ok) return {to_big(acc), false};
    }
    BigInt acc = 0;
    for (const auto& e : map.entries()) acc += big(e);
    return {acc, true};
}

BigInt big_pow(u64 base, unsigned k) {
    BigInt r = 1;
    for (unsigned i = 0; i < k; ++i) r *= base;
    return r;
}

void require_k(unsigned k, unsigned min, const char* who) {
    if (k < min) fail(ErrorKind::invalid_argument, std::string(who) + ": k too small");
}

// Inclusive index range of primes in [lo, hi].
std::pair<std::size_t, std::size_t> prime_range(const std::vector<u64>& primes, u64 lo, u64 hi) {
    const auto b = std::lower_bound(primes.begin(), primes.end(), lo);
    const auto e = std::upper_bound(primes.begin(), primes.end(), hi);
    return {static_cast<std::size_t>(b - primes.begin()), static_cast<std::size_t>(e - primes.begin())};
}

u64 ceil_sqrt(u64 n) {
    const u64 r = isqrt(n);
    return r * r == n ? r : r + 1;
}

struct Event {
    u64 n;
    bool distinct;
};

std::vector<RepEntry> sweep_segment(const std::vector<u64>& primes, u64 lo, u64 hi) {
    std::vector<Event> events;
    for (u64 p : primes) {
        const u64 p2 = p * p;
        if (2 * p2 > hi) break;
        const u64 q_lo = std::max(p, lo > p2 ? ceil_sqrt(lo - p2) : 0);
        const u64 q_hi = isqrt(hi - p2);
        if (q_lo > q_hi) continue;
        const auto [b, e] = prime_range(primes, q_lo, q_hi);
        for (std::size_t i = b; i < e; ++i) events.push_back({p2 + primes[i] * primes[i], primes[i] != p});
    }
    std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) { return a.n < b.n; });
    std::vector<RepEntry> out;
    for (const auto& ev : events) {
        if (out.empty() || out.back().n != ev.n) out.push_back({ev.n, 0, false});
        if (ev.distinct) {
            ++out.back().R2;
        } else {
            out.back().is_2p2 = true;
        }
    }
    return out;
}

void put_le(std::ostream& out, u64 v, int bytes) {
    for (int i = 0; i < bytes; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xFF));
}

u64 get_le(std::istream& in, int bytes) {
    u64 v = 0;
    for (int i = 0; i < bytes; ++i) {
        const int c = in.get();
        if (c == EOF) fail(ErrorKind::format_error, "map file truncated");
        v |= static_cast<u64>(static_cast<unsigned char>(c)) << (8 * i);
    }
    return v;
}

// Advisory exclusive lock held for the lifetime of the object.
class FileLock {
public:
    explicit FileLock(const std::filesystem::path& path) {
        fd_ = ::open(path.c_str(), O_RDWR | O_CREAT, 0644);
        if (fd_ < 0) fail(ErrorKind::io_error, "cannot open lock file " + path.string());
        if (::flock(fd_, LOCK_EX) != 0) {
            ::close(fd_);
            fail(ErrorKind::io_error, "cannot lock " + path.string());
        }
    }
    ~FileLock() {
        ::flock(fd_, LOCK_UN);
        ::close(fd_);
    }
    FileLock(const FileLock&) = delete;
    FileLock& operator=(const FileLock&) = delete;

private:
    int fd_ = -1;
};

}  // namespace

RepMultiplicityMap::RepMultiplicityMap(u64 x, std::vector<RepEntry> entries) : x_(x), entries_(std::move(entries)) {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const auto& e = entries_[i];
        if (e.n > x_ || (i > 0 && entries_[i - 1].n >= e.n) || e.r2() == 0) {
            fail(ErrorKind::format_error, "RepMultiplicityMap: entries must be sorted, unique, <= x, r2 > 0");
        }
        total_pairs_ += e.r2();
    }
}

const RepEntry* RepMultiplicityMap::find(u64 n) const noexcept {
    const auto it = std::lower_bound(entries_.begin(), entries_.end(), n,
                                     [](const RepEntry& e, u64 v) { return e.n < v; });
    return it != entries_.end() && it->n == n ? &*it : nullptr;
}

u64 estimate_sweep_bytes(u64 x) {
    const double root = std::sqrt(static_cast<double>(x));
    // pi(y) < 1.26 y / log y for y > 1.
    const double primes = root < 3 ? 2 : 1.26 * root / std::log(root);
    const double pairs = primes * (primes + 1) / 2;
    return static_cast<u64>(pairs * (sizeof(RepEntry) + sizeof(Event)) + primes * sizeof(u64));
}

RepMultiplicityMap sweep_prime_pairs(const SweepConfig& config) {
    if (config.x < 1) fail(ErrorKind::invalid_argument, "sweep: x must be >= 1");
    if (config.worker_count < 1) fail(ErrorKind::invalid_argument, "sweep: worker_count must be >= 1");
    const u64 need = estimate_sweep_bytes(config.x);
    if (need > config.memory_budget) {
        std::ostringstream msg;
        msg << "sweep at x=" << config.x << " needs about " << (need >> 20) << " MiB but the budget is "
            << (config.memory_budget >> 20) << " MiB; lower --x or raise the memory budget";
        fail(ErrorKind::resource_limit, msg.str());
    }
    if (config.x < 8) return RepMultiplicityMap(config.x, {});

    const u64 x = config.x;
    const std::vector<u64> primes = build_prime_table(std::max<u64>(2, isqrt(x - 4))).primes();
    const u64 span = config.segment_span ? config.segment_span : std::max<u64>(u64{1} << 20, x / 64 + 1);
    const u64 segments = (x + span - 1) / span;

    std::vector<std::vector<RepEntry>> parts(segments);
    auto run = [&](u64 s) {
        const u64 lo = s * span + 1;
        const u64 hi = std::min(x, lo + span - 1);
        parts[s] = sweep_segment(primes, lo, hi);
    };
    const unsigned workers = static_cast<unsigned>(std::min<u64>(config.worker_count, segments));
    if (workers <= 1) {
        for (u64 s = 0; s < segments; ++s) run(s);
    } else {
        std::atomic<u64> next{0};
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (u64 s = next++; s < segments; s = next++) run(s);
            });
        }
        for (auto& t : pool) t.join();
    }

    std::size_t total = 0;
    for (const auto& p : parts) total += p.size();
    std::vector<RepEntry> entries;
    entries.reserve(total);
    for (auto& p : parts) {
        entries.insert(entries.end(), p.begin(), p.end());
        std::vector<RepEntry>().swap(p);
    }
    return RepMultiplicityMap(x, std::move(entries));
}

void write_map(const RepMultiplicityMap& map, std::ostream& out) {
    out.write("PSMM", 4);
    put_le(out, kMapFormatVersion, 4);
    put_le(out, map.x(), 8);
    put_le(out, map.size(), 8);
    for (const auto& e : map.entries()) {
        put_le(out, e.n, 8);
        put_le(out, e.R2, 4);
        put_le(out, e.is_2p2 ? 1 : 0, 1);
    }
    if (!out) fail(ErrorKind::io_error, "write_map: stream error");
}

RepMultiplicityMap read_map(std::istream& in) {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::string_view(magic, 4) != "PSMM") fail(ErrorKind::format_error, "map file: bad magic");
    if (get_le(in, 4) != kMapFormatVersion) fail(ErrorKind::format_error, "map file: version mismatch");
    const u64 x = get_le(in, 8);
    const u64 count = get_le(in, 8);
    if (count > x) fail(ErrorKind::format_error, "map file: entry count exceeds x");
    std::vector<RepEntry> entries;
    entries.reserve(count);
    for (u64 i = 0; i < count; ++i) {
        const u64 n = get_le(in, 8);
        const auto R2 = static_cast<std::uint32_t>(get_le(in, 4));
        const u64 flags = get_le(in, 1);
        if (flags > 1) fail(ErrorKind::format_error, "map file: bad flags byte");
        entries.push_back({n, R2, flags == 1});
    }
    if (in.peek() != EOF) fail(ErrorKind::format_error, "map file: trailing bytes");
    return RepMultiplicityMap(x, std::move(entries));
}

std::string serialize_map(const RepMultiplicityMap& map) {
    std::ostringstream out(std::ios::binary);
    write_map(map, out);
    return out.str();
}

std::filesystem::path map_cache_path(const std::filesystem::path& dir, u64 x) {
    return dir / ("psmm_x" + std::to_string(x) + "_v" + std::to_string(kMapFormatVersion) + ".bin");
}

CachedSweep load_or_sweep(const SweepConfig& config) {
    if (!config.cache_dir) return {sweep_prime_pairs(config), CacheStatus::disabled, {}};
    std::filesystem::create_directories(*config.cache_dir);
    const auto path = map_cache_path(*config.cache_dir, config.x);
    FileLock lock(path.string() + ".lock");

    CacheStatus status = CacheStatus::miss;
    if (std::filesystem::exists(path)) {
        try {
            std::ifstream in(path, std::ios::binary);
            RepMultiplicityMap map = read_map(in);
            if (map.x() == config.x) return {std::move(map), CacheStatus::hit, path};
        } catch (const Error&) {
        }
        status = CacheStatus::rebuilt;
    }
    RepMultiplicityMap map = sweep_prime_pairs(config);
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail(ErrorKind::io_error, "cannot write cache " + tmp);
        write_map(map, out);
    }
    std::filesystem::rename(tmp, path);
    return {std::move(map), status, path};
}

ExactCount raw_moment(const RepMultiplicityMap& map, unsigned k) {
    require_k(k, 1, "raw_moment");
    return fold(
        map, k, [k](const RepEntry& e, u128& t) { return checked_pow(e.r2(), k, t); },
        [k](const RepEntry& e) { return big_pow(e.r2(), k); });
}

ExactCount power_sum_R2(const RepMultiplicityMap& map, unsigned k) {
    require_k(k, 1, "power_sum_R2");
    return fold(
        map, k, [k](const RepEntry& e, u128& t) { return checked_pow(e.R2, k, t); },
        [k](const RepEntry& e) { return big_pow(e.R2, k); });
}

ExactCount falling_sum(const RepMultiplicityMap& map, unsigned k) {
    require_k(k, 1, "falling_sum");
    return fold(
        map, k, [k](const RepEntry& e, u128& t) { return checked_falling(e.R2, k, t); },
        [k](const RepEntry& e) { return falling_factorial(e.R2, k); });
}

// Per n with u = R2(n) unordered pairs p < q and e = 1_{n = 2p^2}: choose k
// distinct unordered pairs in order, 2 orientations for p != q and 1 for p = q.
//   k! [C(u, k) 2^k + e C(u, k-1) 2^{k-1}] = 2^k (u)_k + e k 2^{k-1} (u)_{k-1}
ExactCount nondiagonal_count(const RepMultiplicityMap& map, unsigned k) {
    require_k(k, 2, "nondiagonal_count");
    return fold(
        map, k,
        [k](const RepEntry& e, u128& t) {
            u128 a, b, two;
            if (!checked_falling(e.R2, k, a) || !checked_pow(2, k, two) || !checked_mul(a, two)) return false;
            b = 0;
            if (e.is_2p2) {
                if (!checked_falling(e.R2, k - 1, b) || !checked_pow(2, k - 1, two) || !checked_mul(b, two) ||
                    !checked_mul(b, k)) {
                    return false;
                }
            }
            t = a;
            return checked_add(t, b);
        },
        [k](const RepEntry& e) {
            BigInt v = falling_factorial(e.R2, k) * big_pow(2, k);
            if (e.is_2p2) v += falling_factorial(e.R2, k - 1) * big_pow(2, k - 1) * k;
            return v;
        });
}

BigInt stirling2(unsigned n, unsigned k) {
    if (k > n) return 0;
    // {n k} = k {n-1 k} + {n-1 k-1}, built row by row.
    std::vector<BigInt> row(k + 1, 0);
    row[0] = 1;
    for (unsigned i = 1; i <= n; ++i) {
        for (unsigned j = std::min(i, k); j >= 1; --j) row[j] = j * row[j] + row[j - 1];
        row[0] = 0;
    }
    return row[k];
}

BigInt stirling_convert(const std::vector<BigInt>& falling, unsigned k) {
    if (k < 1) fail(ErrorKind::invalid_argument, "stirling_convert: k >= 1");
    if (falling.size() < k) fail(ErrorKind::invalid_argument, "stirling_convert: need S_1..S_k");
    BigInt total = 0;
    for (unsigned l = 1; l <= k; ++l) total += stirling2(k, l) * falling[l - 1];
    return total;
}

MassFunctionTable mass_function(const RepMultiplicityMap& map) {
    MassFunctionTable t;
    t.x = map.x();
    for (const auto& e : map.entries()) {
        if (e.R2 >= 1) ++t.rows[e.R2];
    }
    return t;
}

std::map<unsigned, u64> count_M_by_omega(u64 x) {
    if (x < 2) fail(ErrorKind::invalid_argument, "count_M_by_omega: x >= 2");
    if (x > kFactorizeLimit) fail(ErrorKind::unsupported_range, "count_M_by_omega: x above 1e12");
    // n = 2m with m odd and every prime factor of m equal to 1 mod 4.
    const u64 m_max = x / 2;
    std::map<unsigned, u64> counts;
    const std::vector<u64> base = build_prime_table(std::max<u64>(2, isqrt(m_max) + 1)).primes();
    std::vector<unsigned char> omega, bad;
    u64 block_lo = 1;
    const u64 block = u64{1} << 18;
    while (block_lo <= m_max) {
        const u64 block_hi = std::min(m_max, block_lo + block - 1);
        omega.assign(block_hi - block_lo + 1, 0);
        bad.assign(block_hi - block_lo + 1, 0);
        detail::factor_sieve(
            block_lo, block_hi, base,
            [&](u64 n, u64 p, unsigned) {
                ++omega[n - block_lo];
                if (p % 4 != 1) bad[n - block_lo] = 1;
            },
            [&](u64 n, u64 rest) {
                const u64 i = n - block_lo;
                if (rest > 1) {
                    ++omega[i];
                    if (rest % 4 != 1) bad[i] = 1;
                }
                if (!bad[i]) ++counts[omega[i]];
            },
            block);
        block_lo = block_hi + 1;
    }
    return counts;
}

std::vector<double> log_average_r0(const std::vector<u64>& xs, unsigned k) {
    if (xs.empty()) return {};
    if (!std::is_sorted(xs.begin(), xs.end()) || xs.front() < 1) {
        fail(ErrorKind::invalid_argument, "log_average_r0: xs must be ascending and >= 1");
    }
    const u64 x_max = xs.back();
    if (x_max > (u64{1} << 34)) fail(ErrorKind::unsupported_range, "log_average_r0: x too large");
    const std::vector<u64> base = build_prime_table(std::max<u64>(2, isqrt(x_max) + 1)).primes();
    std::vector<double> out;
    std::size_t next = 0;
    double sum = 0, comp = 0;
    std::vector<u64> r0v;
    u64 block_lo = 1;
    const u64 block = u64{1} << 18;
    while (block_lo <= x_max) {
        const u64 block_hi = std::min(x_max, block_lo + block - 1);
        r0v.assign(block_hi - block_lo + 1, 1);
        detail::factor_sieve(
            block_lo, block_hi, base,
            [&](u64 n, u64 p, unsigned e) {
                u64& v = r0v[n - block_lo];
                if (p % 4 == 1) {
                    v *= e + 1;
                } else if (p % 4 == 3 && e % 2) {
                    v = 0;
                }
            },
            [&](u64 n, u64 rest) {
                u64& v = r0v[n - block_lo];
                if (rest > 1) v = rest % 4 == 1 ? 2 * v : 0;
                const double term = std::pow(static_cast<double>(v), k) / static_cast<double>(n);
                const double t = sum + term;
                comp += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
                sum = t;
                while (next < xs.size() && xs[next] == n) {
                    out.push_back(sum + comp);
                    ++next;
                }
            },
            block);
        block_lo = block_hi + 1;
    }
    return out;
}

std::optional<double> predicted_moment(u64 x, unsigned k) {
    if (x < 3 || k < 1 || k > 3) return std::nullopt;
    const double L = std::log(static_cast<double>(x));
    const double c = k == 1 ? 1.0 : (k == 2 ? 2.0 : 4.0);
    return c * std::numbers::pi * static_cast<double>(x) / (L * L);
}

MomentReport build_moment_report(const RepMultiplicityMap& map, unsigned k_max, bool with_nondiagonal) {
    MomentReport report;
    report.x = map.x();
    for (unsigned k = 1; k <= k_max; ++k) {
        MomentRow row;
        row.k = k;
        row.raw = raw_moment(map, k).value;
        row.falling = falling_sum(map, k).value;
        if (with_nondiagonal && k >= 2) row.nondiagonal = nondiagonal_count(map, k).value;
        row.predicted = predicted_moment(map.x(), k);
        if (row.predicted) row.ratio = row.raw.convert_to<double>() / *row.predicted;
        report.rows.push_back(std::move(row));
    }
    return report;
}

std::vector<MassFunctionRow> mass_function_rows(const MassFunctionTable& table, const HeuristicConstants& constants) {
    std::vector<MassFunctionRow> rows;
    for (const auto& [r, count] : table.rows) {
        MassFunctionRow row{r, count, std::nullopt, std::nullopt};
        if (table.x >= 16) {
            PredictParams params{static_cast<double>(table.x), 0, static_cast<unsigned>(r), &constants, 64};
            const Quantity q = r == 1 ? Quantity::N1 : (r == 2 ? Quantity::N2 : Quantity::Nr);
            row.predicted = predict(q, params);
            row.ratio = static_cast<double>(count) / *row.predicted;
        }
        rows.push_back(row);
    }
    return rows;
}

std::string format_double(double v) {
    std::ostringstream s;
    s.imbue(std::locale::classic());
    s << std::setprecision(17) << v;
    return s.str();
}

namespace {
std::string opt_str(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }
}  // namespace

void write_moments_csv(const std::vector<MomentReport>& reports, std::ostream& out) {
    out << "x,k,raw,falling,nondiagonal,predicted,ratio\n";
    for (const auto& rep : reports) {
        for (const auto& row : rep.rows) {
            out << rep.x << ',' << row.k << ',' << row.raw << ',' << row.falling << ','
                << (row.nondiagonal ? row.nondiagonal->str() : std::string()) << ',' << opt_str(row.predicted)
                << ',' << opt_str(row.ratio) << '\n';
        }
    }
}

void write_massfn_csv(u64 x, const std::vector<MassFunctionRow>& rows, std::ostream& out) {
    out << "x,r,N_r,predicted,ratio\n";
    for (const auto& row : rows) {
        out << x << ',' << row.r << ',' << row.count << ',' << opt_str(row.predicted) << ',' << opt_str(row.ratio)
            << '\n';
    }
}

void write_omega_csv(u64 x, const std::map<unsigned, u64>& counts, std::ostream& out) {
    out << "x,m,count\n";
    for (const auto& [m, count] : counts) out << x << ',' << m << ',' << count << '\n';
}

}  // namespace pslab
