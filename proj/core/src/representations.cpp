#include "pslab/representations.hpp"

#include "pslab/error.hpp"

namespace pslab {

namespace {

void require_positive(u64 n, const char* who) {
    if (n == 0) fail(ErrorKind::invalid_argument, std::string(who) + ": n must be >= 1");
}

// Square root of -1 mod p for p = 1 mod 4.
u64 sqrt_minus_one(u64 p) {
    for (u64 c = 2; c < p; ++c) {
        // c is a non-residue iff c^((p-1)/2) = -1; then c^((p-1)/4) squares to -1.
        if (powmod(c, (p - 1) / 2, p) == p - 1) return powmod(c, (p - 1) / 4, p);
    }
    fail(ErrorKind::invalid_argument, "sqrt_minus_one: p is not 1 mod 4 prime");
}

}  // namespace

u64 r0(u64 n, const PrimeTable* table) {
    require_positive(n, "r0");
    const Factorization f = factorize(n, table);
    // sum_{d|n} chi4(d) is multiplicative: 1 at p = 2, e+1 at p = 1 mod 4,
    // and 1 or 0 at p = 3 mod 4 according to the parity of e.
    i64 total = 1;
    for (const auto& pp : f.factors()) {
        if (pp.prime == 2) continue;
        if (pp.prime % 4 == 1) {
            total *= pp.exponent + 1;
        } else if (pp.exponent % 2) {
            return 0;
        }
    }
    return static_cast<u64>(total);
}

std::vector<RepPair> enumerate_reps(u64 n) {
    std::vector<RepPair> out;
    const u64 root = isqrt(n);
    for (u64 a = 0; a <= root; ++a) {
        const u64 rest = n - a * a;
        if (rest == 0) continue;
        const u64 b = isqrt(rest);
        if (b * b == rest) out.push_back({a, b});
    }
    return out;
}

std::pair<u64, u64> represent_prime(u64 p) {
    if (!is_prime(p)) fail(ErrorKind::invalid_argument, "represent_prime: argument is not prime");
    if (p == 2) return {1, 1};
    if (p % 4 == 3) fail(ErrorKind::no_representation, "represent_prime: p = 3 mod 4 is not a sum of two squares");
    // Hermite-Serret descent: Euclid on (p, sqrt(-1)) until the remainder drops below sqrt(p).
    u64 a = p;
    u64 b = sqrt_minus_one(p);
    if (b > p / 2) b = p - b;
    const u64 root = isqrt(p);
    while (b > root) {
        const u64 t = a % b;
        a = b;
        b = t;
    }
    const u64 s = isqrt(p - b * b);
    return b < s ? std::pair{b, s} : std::pair{s, b};
}

u64 r2(u64 n) {
    u64 count = 0;
    for (const auto& rep : enumerate_reps(n)) {
        if (is_prime(rep.a) && is_prime(rep.b)) ++count;
    }
    return count;
}

u64 R2(u64 n) {
    u64 count = 0;
    for (const auto& rep : enumerate_reps(n)) {
        if (rep.a < rep.b && is_prime(rep.a) && is_prime(rep.b)) ++count;
    }
    return count;
}

u64 r1(u64 n) {
    u64 count = 0;
    for (const auto& rep : enumerate_reps(n)) {
        if (rep.a >= 1 && is_prime(rep.b)) ++count;
    }
    return count;
}

bool is_twice_prime_square(u64 n) {
    if (n % 2) return false;
    const u64 h = n / 2;
    return is_square(h) && is_prime(isqrt(h));
}

unsigned omega_star(u64 n, const PrimeTable* table) {
    require_positive(n, "omega_star");
    unsigned count = 0;
    for (const auto& pp : factorize(n, table).factors()) {
        if (pp.prime != 2) ++count;
    }
    return count;
}

bool in_class_M(u64 n, const PrimeTable* table) {
    require_positive(n, "in_class_M");
    if (n % 2 != 0 || (n / 2) % 2 == 0) return false;
    for (const auto& pp : factorize(n / 2, table).factors()) {
        if (pp.prime % 4 != 1) return false;
    }
    return true;
}

RepProfile profile(u64 n, const PrimeTable* table) {
    require_positive(n, "profile");
    RepProfile p;
    p.n = n;
    p.r0 = r0(n, table);
    p.r2 = r2(n);
    p.R2 = R2(n);
    p.is_2p2 = is_twice_prime_square(n);
    p.omega_star = omega_star(n, table);
    p.in_M = in_class_M(n, table);
    return p;
}

}  // namespace pslab
