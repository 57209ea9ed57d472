#pragma once

// Segmented trial-division sieve: walks [lo, hi] in blocks and reports each
// prime power exactly dividing n, then the leftover cofactor, which is 1 or a
// prime dividing n exactly once. base_primes must cover sqrt(hi).

#include <algorithm>
#include <vector>

#include "pslab/arith.hpp"

namespace pslab::detail {

template <class OnPrimePower, class OnDone>
void factor_sieve(u64 lo, u64 hi, const std::vector<u64>& base_primes, OnPrimePower&& on_prime_power,
                  OnDone&& on_done, u64 block = u64{1} << 18) {
    std::vector<u64> residual;
    for (u64 b_lo = lo; b_lo <= hi; b_lo += block) {
        const u64 b_hi = std::min(hi, b_lo + block - 1);
        residual.resize(b_hi - b_lo + 1);
        for (u64 n = b_lo; n <= b_hi; ++n) residual[n - b_lo] = n;
        for (u64 p : base_primes) {
            if (p * p > b_hi) break;
            for (u64 m = (b_lo + p - 1) / p * p; m <= b_hi; m += p) {
                u64& r = residual[m - b_lo];
                unsigned e = 0;
                while (r % p == 0) {
                    r /= p;
                    ++e;
                }
                on_prime_power(m, p, e);
            }
        }
        for (u64 n = b_lo; n <= b_hi; ++n) on_done(n, residual[n - b_lo]);
        if (b_hi == hi) break;
    }
}

}  // namespace pslab::detail
