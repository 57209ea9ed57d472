#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pslab/arith.hpp"
#include "pslab/prime_engine.hpp"

namespace pslab {

struct Slot {
    i64 m;
    i64 n;
    friend bool operator==(const Slot&, const Slot&) = default;
    friend auto operator<=>(const Slot&, const Slot&) = default;
};

// k slots (m_i, n_i) on the circle m^2 + n^2 = N, pairwise distinct.
class RepTuple {
public:
    RepTuple(u64 N, std::vector<Slot> slots);

    u64 norm() const noexcept { return N_; }
    std::size_t k() const noexcept { return slots_.size(); }
    const std::vector<Slot>& slots() const noexcept { return slots_; }
    const Slot& operator[](std::size_t i) const { return slots_[i]; }
    // gcd(m_i, n_i) = 1 for every slot.
    bool coprime() const noexcept { return coprime_; }

    RepTuple restrict(const std::vector<std::size_t>& indices) const;

    friend bool operator==(const RepTuple&, const RepTuple&) = default;

private:
    u64 N_;
    std::vector<Slot> slots_;
    bool coprime_;
};

// One (min, max) form per unordered representation {a, b} of N.
std::vector<Slot> canonical_reps(u64 N, bool require_coprime);

// All k-subsets of canonical_reps(N), lexicographic.
std::vector<RepTuple> build_rep_tuples(u64 N, unsigned k, bool require_coprime);

// Every (u, v) in Z^2 with u^2 + v^2 = N, found by scanning u.
std::vector<Slot> signed_reps(u64 N);

// Ordered k-tuples of distinct signed representations of N.
BigInt count_signed_tuples(u64 N, unsigned k);
void for_each_signed_tuple(u64 N, unsigned k, const std::function<void(const std::vector<Slot>&)>& visit);

// (m_i n_j - m_j n_i) and (m_i m_j + n_i n_j) for i < j, in that order.
std::vector<i64> pair_factors(const RepTuple& tuple);
// R(m, n) = prod_{i<j} (m_i n_j - m_j n_i)(m_i m_j + n_i n_j); k >= 2.
BigInt pair_product(const RepTuple& tuple);
bool prime_divides_pair_product(const RepTuple& tuple, u64 p);

inline constexpr u64 kExhaustiveThreshold = 101;

// #{(r, s) in F_p^2 : (r^2 + s^2) prod_i (m_i r - n_i s)(n_i r + m_i s) = 0}.
u64 nu_p_exhaustive(const RepTuple& tuple, u64 p);
u64 nu_p_projective(const RepTuple& tuple, u64 p);
u64 nu_p(const RepTuple& tuple, u64 p);

// Number of distinct projective roots of the form, p + 1 if it vanishes identically.
u64 projective_root_count(const RepTuple& tuple, u64 p);

enum class DensityCase { divides_N, generic, divides_R_only };
std::string_view to_string(DensityCase c) noexcept;

struct LocalDensity {
    u64 p;
    u64 nu_p;
    u64 q_p;
    DensityCase which;
};

LocalDensity classify_qp(const RepTuple& tuple, u64 p);

struct SingularSeriesValue {
    double value = 0;
    u64 cutoff_prime = 0;                // largest prime <= cutoff
    std::vector<u64> exceptional_primes; // primes dividing N * R, handled exactly
    double tail_bound = 0;               // bound on |log| of the omitted product
    bool admissible = false;
};

// Product over p <= cutoff (plus exceptional primes above it), with the
// generic factors compensated by (1 - chi4(p)/p)^{-1} and 1/L(1, chi4) = 4/pi.
SingularSeriesValue singular_series(const RepTuple& tuple, u64 cutoff);
SingularSeriesValue singular_series(const RepTuple& tuple, u64 cutoff, const PrimeTable& primes);

// Constant C_k in the tail bound C_k * sum_{p > cutoff} 1/p^2.
double singular_tail_constant(unsigned k) noexcept;

// minus_plus: (a^2+1) prod (m_i a - n_i)(n_i a + m_i)
// plus_minus: (a^2+1) prod (m_i a + n_i)(n_i a - m_i)
enum class SignConvention { minus_plus, plus_minus };

struct AdmissibilityWitness {
    std::map<u64, u64> assignments;  // p -> a_p for p <= 2k + 2
};

struct Admissibility {
    bool admissible = false;
    std::optional<AdmissibilityWitness> witness;
    std::optional<u64> blocking_prime;
};

Admissibility is_admissible(const RepTuple& tuple, SignConvention convention = SignConvention::minus_plus);

bool witness_valid(const RepTuple& tuple, const AdmissibilityWitness& witness,
                   SignConvention convention = SignConvention::minus_plus);

struct AdmissibleSubset {
    std::vector<std::size_t> indices;  // zero-based, ascending
    AdmissibilityWitness witness;
};

// Greedy elimination over p <= 2k + 2: drop the smallest residue class of
// slots killed by some a with p !| a^2 + 1. Requires coprime slots, 2 || N, k >= 2.
AdmissibleSubset admissible_subset(const RepTuple& tuple);

// The elimination step on its own: primes in increasing order, no hypotheses
// checked, slots need not share a norm. May return an empty index set.
AdmissibleSubset greedy_elimination(const std::vector<Slot>& slots, const std::vector<u64>& primes);

struct FkOptions {
    unsigned workers = 1;
};

// #{(r, s) in N^2 : r^2 + s^2 <= z, 0 < m_i r - n_i s < n_i r + m_i s,
//   r^2 + s^2 and all 2k forms prime}; star adds P^+(N) <= r^2 + s^2.
u64 count_fk(u64 z, const RepTuple& tuple, bool star, const FkOptions& options = {});

struct SieveRatio {
    u64 z = 0;
    u64 f_k = 0;
    double singular = 0;
    double ratio = 0;
};

// f_k(z) (log z)^{2k+1} / (S z).
SieveRatio sieve_ratio(u64 z, const RepTuple& tuple, u64 cutoff = 1'000'000);

// Corpus format: one tuple per line, "N k m1 n1 ... mk nk"; '#' comments and blank lines skipped.
std::vector<RepTuple> read_corpus(std::istream& in);
void write_corpus(const std::vector<RepTuple>& tuples, std::ostream& out);

struct SingularRow {
    std::size_t tuple_id = 0;
    u64 N = 0;
    std::size_t k = 0;
    std::optional<SingularSeriesValue> series;
    bool admissible = false;
    std::string status;  // ok, non-admissible, degenerate
    u64 cutoff = 0;
    u64 count_divides_N = 0;
    u64 count_generic = 0;
    u64 count_divides_R_only = 0;
};

std::vector<SingularRow> singular_report(const std::vector<RepTuple>& tuples, u64 cutoff);
void write_singular_csv(const std::vector<SingularRow>& rows, std::ostream& out);

}  // namespace pslab
