#include "oracles.hpp"

namespace pslab::oracle {

bool trial_is_prime(u64 n) {
    if (n < 2) return false;
    for (u64 d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

std::vector<u64> trial_primes(u64 limit) {
    std::vector<u64> out;
    for (u64 n = 2; n <= limit; ++n)
        if (trial_is_prime(n)) out.push_back(n);
    return out;
}

u64 ordered_prime_pairs(u64 x) {
    const auto ps = trial_primes(isqrt(x));
    u64 count = 0;
    for (u64 p : ps)
        for (u64 q : ps)
            if (p * p + q * q <= x) ++count;
    return count;
}

u64 nondiagonal_pairs_4loop(u64 x, u64 prime_bound) {
    const auto ps = trial_primes(prime_bound);
    u64 count = 0;
    for (u64 p1 : ps)
        for (u64 q1 : ps) {
            const u64 s = p1 * p1 + q1 * q1;
            if (s > x) continue;
            for (u64 p2 : ps)
                for (u64 q2 : ps) {
                    if (p2 * p2 + q2 * q2 != s) continue;
                    const bool same = (p1 == p2 && q1 == q2) || (p1 == q2 && q1 == p2);
                    if (!same) ++count;
                }
        }
    return count;
}

u64 r0_divisor_sum(u64 n) {
    i64 s = 0;
    for (u64 d = 1; d <= n; ++d)
        if (n % d == 0) s += chi4(static_cast<i64>(d));
    return static_cast<u64>(s);
}

u64 fk_double_loop(u64 z, const RepTuple& t, bool star, bool s_outer) {
    u64 pmax = 1;
    for (u64 n = t.norm(), d = 2; n > 1; ++d) {
        if (d * d > n) {
            pmax = std::max(pmax, n);
            break;
        }
        while (n % d == 0) {
            n /= d;
            pmax = std::max(pmax, d);
        }
    }
    auto accept = [&](i64 r, i64 s) {
        const u64 norm = static_cast<u64>(r * r + s * s);
        if (norm > z) return false;
        if (star && norm < pmax) return false;
        for (const auto& sl : t.slots()) {
            const i64 a = sl.m * r - sl.n * s, b = sl.n * r + sl.m * s;
            if (!(0 < a && a < b)) return false;
        }
        if (!trial_is_prime(norm)) return false;
        for (const auto& sl : t.slots()) {
            if (!trial_is_prime(static_cast<u64>(sl.m * r - sl.n * s))) return false;
            if (!trial_is_prime(static_cast<u64>(sl.n * r + sl.m * s))) return false;
        }
        return true;
    };
    const i64 lim = static_cast<i64>(isqrt(z));
    u64 count = 0;
    for (i64 a = 1; a <= lim; ++a)
        for (i64 b = 1; b <= lim; ++b)
            if (s_outer ? accept(b, a) : accept(a, b)) ++count;
    return count;
}

}  // namespace pslab::oracle
