#pragma once

#include <utility>
#include <vector>

#include "pslab/arith.hpp"
#include "pslab/prime_engine.hpp"

namespace pslab {

// First-quadrant representation n = a^2 + b^2 with a >= 0, b > 0.
struct RepPair {
    u64 a;
    u64 b;
    friend bool operator==(const RepPair&, const RepPair&) = default;
};

struct RepProfile {
    u64 n = 0;
    u64 r0 = 0;
    u64 r2 = 0;
    u64 R2 = 0;
    bool is_2p2 = false;
    unsigned omega_star = 0;
    bool in_M = false;
};

// r0(n) = sum_{d | n} chi4(d), by divisor enumeration.
u64 r0(u64 n, const PrimeTable* table = nullptr);

// All (a, b) with a^2 + b^2 = n, a >= 0, b > 0, sorted by a.
std::vector<RepPair> enumerate_reps(u64 n);

// The unique (r, s), 1 <= r <= s, with r^2 + s^2 = p, for p = 2 or p = 1 mod 4.
std::pair<u64, u64> represent_prime(u64 p);

// Ordered prime pairs (p, q) with p^2 + q^2 = n.
u64 r2(u64 n);
// Prime pairs with p < q.
u64 R2(u64 n);
// Pairs (m, p), m >= 1, p prime, with m^2 + p^2 = n.
u64 r1(u64 n);

bool is_twice_prime_square(u64 n);

// Distinct odd primes dividing n.
unsigned omega_star(u64 n, const PrimeTable* table = nullptr);

// 2 || n and every prime factor of n/2 is 1 mod 4.
bool in_class_M(u64 n, const PrimeTable* table = nullptr);

RepProfile profile(u64 n, const PrimeTable* table = nullptr);

}  // namespace pslab
