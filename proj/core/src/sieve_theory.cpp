#include "pslab/sieve_theory.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "pslab/error.hpp"
#include "pslab/representations.hpp"

namespace pslab {

namespace {

u64 gcd_abs(i64 a, i64 b) {
    return std::gcd(static_cast<u64>(a < 0 ? -a : a), static_cast<u64>(b < 0 ? -b : b));
}

void require_coprime(const RepTuple& t, const char* op) {
    if (!t.coprime()) fail(ErrorKind::precondition_violation, std::string(op) + ": tuple is not coprime");
}

// Evaluate one slot's pair of linear forms at (r, s) modulo p.
u64 eval_slot_mod(const Slot& sl, u64 r, u64 s, u64 p) {
    const u64 m = mod_floor(sl.m, p), n = mod_floor(sl.n, p);
    const u64 a = (mulmod(m, r, p) + p - mulmod(n, s, p)) % p;
    const u64 b = (mulmod(n, r, p) + mulmod(m, s, p)) % p;
    return mulmod(a, b, p);
}

u64 form_mod(const RepTuple& t, u64 r, u64 s, u64 p) {
    u64 v = (mulmod(r, r, p) + mulmod(s, s, p)) % p;
    for (const auto& sl : t.slots()) {
        if (v == 0) return 0;
        v = mulmod(v, eval_slot_mod(sl, r, s, p), p);
    }
    return v;
}

// Affine version (a : 1) under either sign convention.
u64 affine_mod(const RepTuple& t, u64 a, u64 p, SignConvention c) {
    u64 v = (mulmod(a, a, p) + 1) % p;
    for (const auto& sl : t.slots()) {
        if (v == 0) return 0;
        const u64 m = mod_floor(sl.m, p), n = mod_floor(sl.n, p);
        u64 f1, f2;
        if (c == SignConvention::minus_plus) {
            f1 = (mulmod(m, a, p) + p - n) % p;
            f2 = (mulmod(n, a, p) + m) % p;
        } else {
            f1 = (mulmod(m, a, p) + n) % p;
            f2 = (mulmod(n, a, p) + p - m) % p;
        }
        v = mulmod(v, mulmod(f1, f2, p), p);
    }
    return v;
}

bool slot_killed(const Slot& sl, u64 j, u64 p) {
    const u64 m = mod_floor(sl.m, p), n = mod_floor(sl.n, p);
    const u64 f1 = (mulmod(m, j, p) + p - n) % p;
    const u64 f2 = (mulmod(n, j, p) + m) % p;
    return f1 == 0 || f2 == 0;
}

std::vector<u64> small_primes_upto(u64 bound) {
    std::vector<u64> out;
    for (u64 p = 2; p <= bound; ++p)
        if (is_prime(p)) out.push_back(p);
    return out;
}

i128 floor_div(i128 a, i128 b) {
    i128 q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

i128 ceil_div(i128 a, i128 b) { return -floor_div(-a, b); }

}  // namespace

RepTuple::RepTuple(u64 N, std::vector<Slot> slots) : N_(N), slots_(std::move(slots)), coprime_(true) {
    if (slots_.empty()) fail(ErrorKind::invalid_argument, "tuple needs k >= 1 slots");
    for (std::size_t i = 0; i < slots_.size(); ++i) {
        const auto& sl = slots_[i];
        const i128 norm = static_cast<i128>(sl.m) * sl.m + static_cast<i128>(sl.n) * sl.n;
        if (norm != static_cast<i128>(N_))
            fail(ErrorKind::invalid_argument, "slot " + std::to_string(i + 1) + " does not lie on m^2 + n^2 = " +
                                                  std::to_string(N_));
        for (std::size_t j = 0; j < i; ++j)
            if (slots_[j] == sl)
                fail(ErrorKind::invalid_argument, "slots " + std::to_string(j + 1) + " and " +
                                                      std::to_string(i + 1) + " coincide");
        if (gcd_abs(sl.m, sl.n) != 1) coprime_ = false;
    }
}

RepTuple RepTuple::restrict(const std::vector<std::size_t>& indices) const {
    std::vector<Slot> out;
    out.reserve(indices.size());
    for (auto i : indices) {
        if (i >= slots_.size()) fail(ErrorKind::invalid_argument, "restrict: index out of range");
        out.push_back(slots_[i]);
    }
    return RepTuple(N_, std::move(out));
}

std::vector<Slot> canonical_reps(u64 N, bool require_coprime) {
    std::vector<Slot> out;
    for (const auto& rep : enumerate_reps(N)) {
        if (rep.a > rep.b) break;
        if (rep.a == 0) continue;
        const Slot sl{static_cast<i64>(rep.a), static_cast<i64>(rep.b)};
        if (require_coprime && gcd_abs(sl.m, sl.n) != 1) continue;
        out.push_back(sl);
    }
    // m = 0 is only a representation when N is a square, and it is never coprime unless N = 1.
    if (!require_coprime || N == 1) {
        if (is_square(N) && N > 0) out.insert(out.begin(), Slot{0, static_cast<i64>(isqrt(N))});
    }
    return out;
}

std::vector<RepTuple> build_rep_tuples(u64 N, unsigned k, bool require_coprime) {
    if (N == 0 || k == 0) fail(ErrorKind::invalid_argument, "build_rep_tuples needs N >= 1 and k >= 1");
    const auto reps = canonical_reps(N, require_coprime);
    std::vector<RepTuple> out;
    if (reps.size() < k) return out;
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    while (true) {
        std::vector<Slot> slots;
        for (auto i : idx) slots.push_back(reps[i]);
        out.emplace_back(N, std::move(slots));
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == reps.size() - k + (i - 1)) --i;
        if (i == 0) break;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
    return out;
}

std::vector<Slot> signed_reps(u64 N) {
    std::vector<Slot> out;
    const u64 lim = isqrt(N);
    for (u64 u = 0; u <= lim; ++u) {
        const u64 rest = N - u * u;
        if (!is_square(rest)) continue;
        const i64 a = static_cast<i64>(u), b = static_cast<i64>(isqrt(rest));
        std::set<Slot> pts{{a, b}, {-a, b}, {a, -b}, {-a, -b}};
        out.insert(out.end(), pts.begin(), pts.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

BigInt count_signed_tuples(u64 N, unsigned k) {
    return falling_factorial(signed_reps(N).size(), k);
}

void for_each_signed_tuple(u64 N, unsigned k, const std::function<void(const std::vector<Slot>&)>& visit) {
    const auto pts = signed_reps(N);
    std::vector<Slot> cur;
    std::vector<bool> used(pts.size(), false);
    std::function<void()> rec = [&] {
        if (cur.size() == k) {
            visit(cur);
            return;
        }
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (used[i]) continue;
            used[i] = true;
            cur.push_back(pts[i]);
            rec();
            cur.pop_back();
            used[i] = false;
        }
    };
    rec();
}

std::vector<i64> pair_factors(const RepTuple& t) {
    std::vector<i64> out;
    for (std::size_t i = 0; i < t.k(); ++i)
        for (std::size_t j = i + 1; j < t.k(); ++j) {
            out.push_back(t[i].m * t[j].n - t[j].m * t[i].n);
            out.push_back(t[i].m * t[j].m + t[i].n * t[j].n);
        }
    return out;
}

BigInt pair_product(const RepTuple& t) {
    if (t.k() < 2) fail(ErrorKind::invalid_argument, "pair_product needs k >= 2");
    BigInt r = 1;
    for (i64 f : pair_factors(t)) r *= f;
    return r;
}

bool prime_divides_pair_product(const RepTuple& t, u64 p) {
    for (i64 f : pair_factors(t))
        if (mod_floor(f, p) == 0) return true;
    return false;
}

u64 nu_p_exhaustive(const RepTuple& t, u64 p) {
    u64 count = 0;
    for (u64 r = 0; r < p; ++r)
        for (u64 s = 0; s < p; ++s)
            if (form_mod(t, r, s, p) == 0) ++count;
    return count;
}

u64 projective_root_count(const RepTuple& t, u64 p) {
    // Points (a : 1) are keyed by a, the point (1 : 0) by p.
    std::set<u64> roots;
    auto add_point = [&](u64 a, u64 b) {
        if (b == 0) {
            roots.insert(p);
        } else {
            roots.insert(mulmod(a, powmod(b, p - 2, p), p));
        }
    };
    for (const auto& sl : t.slots()) {
        const u64 m = mod_floor(sl.m, p), n = mod_floor(sl.n, p);
        if (m == 0 && n == 0) return p + 1;
        add_point(n, m);          // m r - n s = 0
        add_point((p - m) % p, n);  // n r + m s = 0
    }
    if (p == 2) {
        roots.insert(1);
    } else if (p % 4 == 1) {
        for (u64 a = 1; a < p; ++a) {
            const u64 c = powmod(a, (p - 1) / 4, p);
            if (mulmod(c, c, p) == p - 1) {
                roots.insert(c);
                roots.insert(p - c);
                break;
            }
        }
    }
    return roots.size();
}

u64 nu_p_projective(const RepTuple& t, u64 p) {
    const u64 q = projective_root_count(t, p);
    if (q == p + 1) return p * p;
    return q * (p - 1) + 1;
}

u64 nu_p(const RepTuple& t, u64 p) {
    if (!is_prime(p)) fail(ErrorKind::invalid_argument, "nu_p: " + std::to_string(p) + " is not prime");
    return p <= kExhaustiveThreshold ? nu_p_exhaustive(t, p) : nu_p_projective(t, p);
}

std::string_view to_string(DensityCase c) noexcept {
    switch (c) {
    case DensityCase::divides_N: return "divides_N";
    case DensityCase::generic: return "generic";
    case DensityCase::divides_R_only: return "divides_R_only";
    }
    return "?";
}

LocalDensity classify_qp(const RepTuple& t, u64 p) {
    require_coprime(t, "classify_qp");
    if (!is_prime(p)) fail(ErrorKind::invalid_argument, "classify_qp: " + std::to_string(p) + " is not prime");
    LocalDensity d{p, 0, projective_root_count(t, p), DensityCase::generic};
    d.nu_p = d.q_p * (p - 1) + 1;
    if (t.norm() % p == 0) {
        d.which = DensityCase::divides_N;
    } else if (t.k() >= 2 && prime_divides_pair_product(t, p)) {
        d.which = DensityCase::divides_R_only;
    }
    if (p <= kExhaustiveThreshold && nu_p_exhaustive(t, p) != d.nu_p)
        throw std::logic_error("classify_qp: projective count disagrees with exhaustive count at p = " +
                               std::to_string(p));
    return d;
}

double singular_tail_constant(unsigned k) noexcept {
    const double d = 2.0 * k + 2.0;
    return 4.0 * d * d;
}

SingularSeriesValue singular_series(const RepTuple& t, u64 cutoff) {
    require_coprime(t, "singular_series");
    if (cutoff < 2 * t.k() + 2)
        fail(ErrorKind::invalid_argument, "singular_series: cutoff must be at least 2k + 2");
    return singular_series(t, cutoff, build_prime_table(cutoff));
}

SingularSeriesValue singular_series(const RepTuple& t, u64 cutoff, const PrimeTable& table) {
    require_coprime(t, "singular_series");
    const u64 k = t.k();
    if (cutoff < 2 * k + 2) fail(ErrorKind::invalid_argument, "singular_series: cutoff must be at least 2k + 2");
    if (table.limit() < cutoff) fail(ErrorKind::invalid_argument, "singular_series: prime table below cutoff");

    SingularSeriesValue out;
    out.tail_bound = singular_tail_constant(static_cast<unsigned>(k)) / static_cast<double>(cutoff);
    for (auto it = table.primes().rbegin(); it != table.primes().rend(); ++it)
        if (*it <= cutoff) {
            out.cutoff_prime = *it;
            break;
        }

    // Admissibility is decided at p <= 2k + 2; a full cover there makes the product vanish.
    const auto adm = is_admissible(t);
    if (!adm.admissible) {
        out.value = 0;
        out.admissible = false;
        out.exceptional_primes = {*adm.blocking_prime};
        return out;
    }
    out.admissible = true;

    std::set<u64> exceptional;
    for (const auto& pp : factorize(t.norm()).factors()) exceptional.insert(pp.prime);
    for (i64 f : pair_factors(t)) {
        if (f == 0)
            fail(ErrorKind::precondition_violation, "singular_series: pair product vanishes (degenerate slots)");
        for (const auto& pp : factorize(static_cast<u64>(f < 0 ? -f : f)).factors()) exceptional.insert(pp.prime);
    }
    out.exceptional_primes.assign(exceptional.begin(), exceptional.end());

    const double e = 2.0 * static_cast<double>(k) + 1.0;
    auto log_factor = [&](u64 p, u64 nu) {
        const double pd = static_cast<double>(p);
        return std::log1p(-static_cast<double>(nu) / (pd * pd)) - e * std::log1p(-1.0 / pd);
    };
    auto compensator = [](u64 p) {
        return std::log1p(-static_cast<double>(chi4(static_cast<i64>(p))) / static_cast<double>(p));
    };

    // Neumaier summation of the residual logs in prime order.
    double sum = 0, comp = 0;
    auto add = [&](double v) {
        const double s = sum + v;
        comp += std::abs(sum) >= std::abs(v) ? (sum - s) + v : (v - s) + sum;
        sum = s;
    };
    for (u64 p : table.primes()) {
        if (p > cutoff) break;
        u64 nu;
        if (exceptional.count(p)) {
            nu = nu_p_projective(t, p);
        } else {
            nu = static_cast<u64>(static_cast<i64>(2 * k + 1) + chi4(static_cast<i64>(p))) * (p - 1) + 1;
        }
        add(log_factor(p, nu) - compensator(p));
    }
    for (u64 p : out.exceptional_primes)
        if (p > cutoff) add(log_factor(p, nu_p_projective(t, p)) - compensator(p));

    out.value = std::exp(sum + comp + std::log(4.0 / std::numbers::pi));
    return out;
}

Admissibility is_admissible(const RepTuple& t, SignConvention c) {
    require_coprime(t, "is_admissible");
    Admissibility out;
    AdmissibilityWitness w;
    for (u64 p : small_primes_upto(2 * t.k() + 2)) {
        bool found = false;
        for (u64 a = 0; a < p; ++a)
            if (affine_mod(t, a, p, c) != 0) {
                w.assignments[p] = a;
                found = true;
                break;
            }
        if (!found) {
            out.blocking_prime = p;
            return out;
        }
    }
    out.admissible = true;
    out.witness = std::move(w);
    return out;
}

bool witness_valid(const RepTuple& t, const AdmissibilityWitness& w, SignConvention c) {
    for (u64 p : small_primes_upto(2 * t.k() + 2)) {
        auto it = w.assignments.find(p);
        if (it == w.assignments.end() || affine_mod(t, it->second % p, p, c) == 0) return false;
    }
    return true;
}

AdmissibleSubset greedy_elimination(const std::vector<Slot>& slots, const std::vector<u64>& primes) {
    AdmissibleSubset out;
    std::vector<std::size_t> alive(slots.size());
    for (std::size_t i = 0; i < alive.size(); ++i) alive[i] = i;
    for (u64 p : primes) {
        std::optional<u64> best_j;
        std::vector<std::size_t> best_drop;
        for (u64 j = 0; j < p; ++j) {
            if ((mulmod(j, j, p) + 1) % p == 0) continue;
            std::vector<std::size_t> drop;
            for (auto i : alive)
                if (slot_killed(slots[i], j, p)) drop.push_back(i);
            if (!best_j || drop.size() < best_drop.size()) {
                best_j = j;
                best_drop = std::move(drop);
            }
        }
        if (!best_j) continue;
        out.witness.assignments[p] = *best_j;
        std::vector<std::size_t> keep;
        std::set_difference(alive.begin(), alive.end(), best_drop.begin(), best_drop.end(), std::back_inserter(keep));
        alive = std::move(keep);
    }
    out.indices = std::move(alive);
    return out;
}

AdmissibleSubset admissible_subset(const RepTuple& t) {
    require_coprime(t, "admissible_subset");
    if (t.k() < 2) fail(ErrorKind::precondition_violation, "admissible_subset needs k >= 2");
    if (t.norm() % 2 != 0 || t.norm() % 4 == 0)
        fail(ErrorKind::precondition_violation, "admissible_subset needs 2 || N");
    auto out = greedy_elimination(t.slots(), small_primes_upto(2 * t.k() + 2));
    if (out.indices.empty()) throw std::logic_error("admissible_subset: elimination removed every slot");
    return out;
}

u64 count_fk(u64 z, const RepTuple& t, bool star, const FkOptions& options) {
    require_coprime(t, "count_fk");
    if (z < 2) fail(ErrorKind::invalid_argument, "count_fk needs z >= 2");
    if (z > kFactorizeLimit) fail(ErrorKind::unsupported_range, "count_fk: z beyond the supported range 1e12");

    const u64 star_floor = star ? largest_prime_factor(t.norm()) : 0;
    const u64 rmax = isqrt(z);
    i64 coef = 0;
    for (const auto& sl : t.slots()) coef = std::max<i64>(coef, std::abs(sl.m) + std::abs(sl.n));
    const u64 form_max = static_cast<u64>(coef) * rmax;

    std::optional<PrimeTable> table;
    const u64 table_limit = std::max(z, form_max);
    if (z >= 1'000'000 && table_limit <= (u64{1} << 32)) table = build_prime_table(table_limit, {.workers = options.workers});
    auto prime = [&](u64 v) { return table ? table->is_prime(v) : is_prime(v); };

    auto count_row = [&](u64 r) {
        if (r * r >= z) return u64{0};
        i128 lo = 1, hi = static_cast<i128>(isqrt(z - r * r));
        const i128 rr = static_cast<i128>(r);
        for (const auto& sl : t.slots()) {
            // m r - n s > 0
            if (sl.n > 0) {
                hi = std::min(hi, ceil_div(sl.m * rr, sl.n) - 1);
            } else if (sl.n < 0) {
                lo = std::max(lo, floor_div(sl.m * rr, sl.n) + 1);
            } else if (sl.m * rr <= 0) {
                return u64{0};
            }
            // (m - n) r < (m + n) s
            const i128 c = sl.m + sl.n, d = (sl.m - sl.n) * rr;
            if (c > 0) {
                lo = std::max(lo, floor_div(d, c) + 1);
            } else if (c < 0) {
                hi = std::min(hi, ceil_div(d, c) - 1);
            } else if (d >= 0) {
                return u64{0};
            }
        }
        u64 count = 0;
        for (i128 s = lo; s <= hi; ++s) {
            const u64 su = static_cast<u64>(s);
            const u64 norm = r * r + su * su;
            if (norm < star_floor || !prime(norm)) continue;
            bool ok = true;
            for (const auto& sl : t.slots()) {
                const i128 a = sl.m * rr - sl.n * s;
                const i128 b = sl.n * rr + sl.m * s;
                if (!prime(static_cast<u64>(a)) || !prime(static_cast<u64>(b))) {
                    ok = false;
                    break;
                }
            }
            if (ok) ++count;
        }
        return count;
    };

    constexpr u64 kRowsPerChunk = 256;
    const u64 chunks = (rmax + kRowsPerChunk) / kRowsPerChunk;
    std::vector<u64> partial(chunks, 0);
    std::atomic<u64> next{0};
    auto worker = [&] {
        for (u64 c; (c = next.fetch_add(1)) < chunks;) {
            u64 acc = 0;
            const u64 r_hi = std::min(rmax, (c + 1) * kRowsPerChunk - 1);
            for (u64 r = std::max<u64>(1, c * kRowsPerChunk); r <= r_hi; ++r) acc += count_row(r);
            partial[c] = acc;
        }
    };
    const unsigned workers = std::max(1u, std::min<unsigned>(options.workers, static_cast<unsigned>(chunks)));
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    u64 total = 0;
    for (u64 v : partial) total += v;
    return total;
}

SieveRatio sieve_ratio(u64 z, const RepTuple& t, u64 cutoff) {
    if (std::log(static_cast<double>(z)) <= 1.0) fail(ErrorKind::invalid_argument, "sieve_ratio needs log z > 1");
    const auto series = singular_series(t, cutoff);
    if (series.value == 0)
        fail(ErrorKind::division_guard, "sieve_ratio: singular series vanishes, tuple is not admissible");
    SieveRatio out;
    out.z = z;
    out.f_k = count_fk(z, t, false);
    out.singular = series.value;
    const double zd = static_cast<double>(z);
    out.ratio = static_cast<double>(out.f_k) * std::pow(std::log(zd), 2.0 * t.k() + 1.0) / (series.value * zd);
    return out;
}

std::vector<RepTuple> read_corpus(std::istream& in) {
    std::vector<RepTuple> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        std::istringstream ss(line);
        std::vector<std::string> tok;
        for (std::string s; ss >> s;) tok.push_back(s);
        if (tok.empty()) continue;
        auto bad = [&](const std::string& why) {
            fail(ErrorKind::format_error, "corpus line " + std::to_string(lineno) + ": " + why);
        };
        auto to_int = [&](const std::string& s) -> i64 {
            std::size_t pos = 0;
            long long v = 0;
            try {
                v = std::stoll(s, &pos);
            } catch (const std::exception&) {
                bad("not an integer: '" + s + "'");
            }
            if (pos != s.size()) bad("not an integer: '" + s + "'");
            return v;
        };
        if (tok.size() < 2) bad("expected N k followed by k pairs");
        const i64 N = to_int(tok[0]), k = to_int(tok[1]);
        if (N < 1) bad("N must be positive");
        if (k < 1) bad("k must be positive");
        if (tok.size() != static_cast<std::size_t>(2 + 2 * k))
            bad("expected " + std::to_string(2 * k) + " slot values, found " + std::to_string(tok.size() - 2));
        std::vector<Slot> slots;
        for (i64 i = 0; i < k; ++i) slots.push_back({to_int(tok[2 + 2 * i]), to_int(tok[3 + 2 * i])});
        try {
            out.emplace_back(static_cast<u64>(N), std::move(slots));
        } catch (const Error& e) {
            bad(e.what());
        }
    }
    return out;
}

void write_corpus(const std::vector<RepTuple>& tuples, std::ostream& out) {
    for (const auto& t : tuples) {
        out << t.norm() << ' ' << t.k();
        for (const auto& sl : t.slots()) out << ' ' << sl.m << ' ' << sl.n;
        out << '\n';
    }
}

std::vector<SingularRow> singular_report(const std::vector<RepTuple>& tuples, u64 cutoff) {
    u64 kmax = 1;
    for (const auto& t : tuples) kmax = std::max<u64>(kmax, t.k());
    if (cutoff < 2 * kmax + 2) fail(ErrorKind::invalid_argument, "singular: cutoff must be at least 2k + 2");
    const auto table = build_prime_table(cutoff);
    u64 prime_total = 0;
    for (u64 p : table.primes())
        if (p <= cutoff) ++prime_total;

    std::vector<SingularRow> rows;
    for (std::size_t id = 0; id < tuples.size(); ++id) {
        const auto& t = tuples[id];
        SingularRow row;
        row.tuple_id = id + 1;
        row.N = t.norm();
        row.k = t.k();
        row.cutoff = cutoff;
        try {
            auto s = singular_series(t, cutoff, table);
            row.admissible = s.admissible;
            row.status = s.admissible ? "ok" : "non-admissible";
            if (s.admissible) {
                for (u64 p : s.exceptional_primes) {
                    if (p > cutoff) continue;
                    if (t.norm() % p == 0) {
                        ++row.count_divides_N;
                    } else {
                        ++row.count_divides_R_only;
                    }
                }
                row.count_generic = prime_total - row.count_divides_N - row.count_divides_R_only;
            }
            row.series = std::move(s);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::precondition_violation) throw;
            row.admissible = t.coprime();
            row.status = t.coprime() ? "degenerate" : "non-coprime";
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_singular_csv(const std::vector<SingularRow>& rows, std::ostream& out) {
    out << "N,k,tuple_id,S,cutoff,tail_bound,admissible,status,divides_N,generic,divides_R_only\n";
    for (const auto& r : rows) {
        std::ostringstream v, tb;
        v.imbue(std::locale::classic());
        tb.imbue(std::locale::classic());
        v.precision(17);
        tb.precision(17);
        if (r.series) {
            v << r.series->value;
            tb << r.series->tail_bound;
        }
        out << r.N << ',' << r.k << ',' << r.tuple_id << ',' << v.str() << ',' << r.cutoff << ',' << tb.str() << ','
            << (r.admissible ? "true" : "false") << ',' << r.status << ',' << r.count_divides_N << ','
            << r.count_generic << ',' << r.count_divides_R_only << '\n';
    }
}

}  // namespace pslab
