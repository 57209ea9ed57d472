#pragma once

#include <bit>
#include <cstdint>
#include <numeric>

#include <boost/multiprecision/cpp_int.hpp>

namespace pslab {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;
using i128 = __int128;
using BigInt = boost::multiprecision::cpp_int;

// floor(sqrt(n)) without floating-point error.
constexpr u64 isqrt(u64 n) noexcept {
    if (n < 2) return n;
    u64 r = static_cast<u64>(__builtin_sqrt(static_cast<double>(n)));
    while (r > 0 && static_cast<u128>(r) * r > n) --r;
    while (static_cast<u128>(r + 1) * (r + 1) <= n) ++r;
    return r;
}

constexpr bool is_square(u64 n) noexcept {
    const u64 r = isqrt(n);
    return r * r == n;
}

constexpr u64 mulmod(u64 a, u64 b, u64 m) noexcept {
    return static_cast<u64>(static_cast<u128>(a) * b % m);
}

constexpr u64 powmod(u64 base, u64 exp, u64 m) noexcept {
    u64 result = 1 % m;
    base %= m;
    while (exp > 0) {
        if (exp & 1) result = mulmod(result, base, m);
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    return result;
}

// Non-principal character mod 4.
constexpr int chi4(i64 n) noexcept {
    const i64 r = ((n % 4) + 4) % 4;
    return r == 1 ? 1 : (r == 3 ? -1 : 0);
}

// Reduce a signed value into [0, m).
constexpr u64 mod_floor(i64 a, u64 m) noexcept {
    const i128 r = static_cast<i128>(a) % static_cast<i128>(m);
    return static_cast<u64>(r < 0 ? r + m : r);
}

inline BigInt binomial(u64 n, u64 k) {
    if (k > n) return 0;
    if (k > n - k) k = n - k;
    BigInt r = 1;
    for (u64 i = 1; i <= k; ++i) {
        r *= n - k + i;
        r /= i;
    }
    return r;
}

inline BigInt factorial(u64 n) {
    BigInt r = 1;
    for (u64 i = 2; i <= n; ++i) r *= i;
    return r;
}

inline BigInt falling_factorial(u64 n, u64 k) {
    if (k > n) return 0;
    BigInt r = 1;
    for (u64 i = 0; i < k; ++i) r *= n - i;
    return r;
}

}  // namespace pslab
