#pragma once

#include <vector>

#include "pslab/arith.hpp"
#include "pslab/sieve_theory.hpp"

// Deliberately naive reference computations, independent of the library's
// sieve, sweep and projective counting paths.
namespace pslab::oracle {

bool trial_is_prime(u64 n);
std::vector<u64> trial_primes(u64 limit);

// Ordered prime pairs (p, q) with p^2 + q^2 <= x.
u64 ordered_prime_pairs(u64 x);

// Ordered ((p1, q1), (p2, q2)) over primes <= prime_bound with
// p1^2 + q1^2 = p2^2 + q2^2 <= x and {p1, q1} != {p2, q2}.
u64 nondiagonal_pairs_4loop(u64 x, u64 prime_bound);

// sum_{d | n} chi4(d) by trial divisors.
u64 r0_divisor_sum(u64 n);

// f_k by plain double loop; s_outer swaps the loop order.
u64 fk_double_loop(u64 z, const RepTuple& tuple, bool star, bool s_outer);

}  // namespace pslab::oracle
