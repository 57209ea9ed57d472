#pragma once

#include <vector>

#include "pslab/sieve_theory.hpp"

namespace pslab::app {

// Random coprime tuples from N <= n_max with r0(N) >= min_r0 and k in
// [2, k_max]; slots get random signs and orientation.
std::vector<RepTuple> sample_coprime_tuples(std::size_t count, u64 seed, u64 n_max = 100'000, u64 min_r0 = 3,
                                            unsigned k_max = 4);

// Random squarefree N = 2 p_1 ... p_w with distinct p_i = 1 mod 4 and w in
// [3, 4], so 2 || N and r0(N) = 2^w >= 8; each tuple holds every coprime
// representation of N.
std::vector<RepTuple> sample_class_M_tuples(std::size_t count, u64 seed);

}  // namespace pslab::app
