#include "sampling.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "pslab/prime_engine.hpp"
#include "pslab/representations.hpp"

namespace pslab::app {

std::vector<RepTuple> sample_coprime_tuples(std::size_t count, u64 seed, u64 n_max, u64 min_r0, unsigned k_max) {
    std::mt19937_64 rng(seed);
    std::vector<RepTuple> out;
    while (out.size() < count) {
        const u64 N = 1 + rng() % n_max;
        if (r0(N) < min_r0) continue;
        auto reps = canonical_reps(N, true);
        if (reps.size() < 2) continue;
        const std::size_t kmax = std::min<std::size_t>(k_max, reps.size());
        const std::size_t k = 2 + rng() % (kmax - 1);
        std::shuffle(reps.begin(), reps.end(), rng);
        std::vector<Slot> slots;
        for (std::size_t i = 0; i < k; ++i) {
            Slot s = reps[i];
            if (rng() & 1) std::swap(s.m, s.n);
            if (rng() & 1) s.m = -s.m;
            if (rng() & 1) s.n = -s.n;
            slots.push_back(s);
        }
        out.emplace_back(N, std::move(slots));
    }
    return out;
}

std::vector<RepTuple> sample_class_M_tuples(std::size_t count, u64 seed) {
    static const std::vector<u64> pool = primes_in_class(400, 1, 4);
    std::mt19937_64 rng(seed);
    std::set<u64> seen;
    std::vector<RepTuple> out;
    while (out.size() < count) {
        const unsigned w = 3 + static_cast<unsigned>(rng() % 2);
        std::set<u64> ps;
        while (ps.size() < w) ps.insert(pool[rng() % pool.size()]);
        u64 N = 2;
        for (u64 p : ps) N *= p;
        if (!seen.insert(N).second) continue;
        out.emplace_back(N, canonical_reps(N, true));
    }
    return out;
}

}  // namespace pslab::app
