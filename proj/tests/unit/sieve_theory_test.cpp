#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "app/oracles.hpp"
#include "app/sampling.hpp"
#include "pslab/error.hpp"
#include "pslab/representations.hpp"
#include "pslab/sieve_theory.hpp"

using namespace pslab;

namespace {

const RepTuple kT130{130, {{3, 11}, {7, 9}}};
const RepTuple kT5{5, {{1, 2}, {2, 1}}};

template <class F>
ErrorKind kind_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no pslab::Error thrown";
    return ErrorKind::io_error;
}

// Direct residue scan at every p <= 2k + 2.
bool brute_admissible(const RepTuple& t, bool plus_minus_signs) {
    for (u64 p : oracle::trial_primes(2 * t.k() + 2)) {
        bool some = false;
        for (i64 a = 0; a < static_cast<i64>(p) && !some; ++a) {
            BigInt v = a * a + 1;
            for (const auto& s : t.slots()) {
                if (plus_minus_signs) {
                    v *= BigInt(s.m * a + s.n) * (s.n * a - s.m);
                } else {
                    v *= BigInt(s.m * a - s.n) * (s.n * a + s.m);
                }
            }
            some = v % p != 0;
        }
        if (!some) return false;
    }
    return true;
}

}  // namespace

TEST(RepTuple, Validation) {
    EXPECT_TRUE(kT130.coprime());
    EXPECT_EQ(kind_of([] { RepTuple(130, {{3, 11}, {3, 11}}); }), ErrorKind::invalid_argument);
    EXPECT_EQ(kind_of([] { RepTuple(130, {{3, 10}}); }), ErrorKind::invalid_argument);
    EXPECT_EQ(kind_of([] { RepTuple(130, {}); }), ErrorKind::invalid_argument);
    EXPECT_FALSE(RepTuple(25, {{0, 5}, {3, 4}}).coprime());
    EXPECT_EQ(kT130.restrict({1}).slots(), (std::vector<Slot>{{7, 9}}));
}

TEST(BuildRepTuples, Examples) {
    const auto t = build_rep_tuples(130, 2, true);
    ASSERT_EQ(t.size(), 1u);
    EXPECT_EQ(t[0], kT130);
    EXPECT_TRUE(build_rep_tuples(3, 1, false).empty());
    EXPECT_TRUE(build_rep_tuples(3, 4, true).empty());
    EXPECT_EQ(count_signed_tuples(25, 5), BigInt(120) * binomial(12, 5));
    EXPECT_EQ(build_rep_tuples(25, 1, false).size(), 2u);  // (0, 5) and (3, 4)
    EXPECT_EQ(build_rep_tuples(25, 1, true).size(), 1u);
    EXPECT_EQ(build_rep_tuples(5525, 3, true).size(), 4u);  // C(4, 3) over 4 coprime forms
}

TEST(BuildRepTuples, OrderedSignedCountIdentity) {
    for (u64 N = 1; N <= 100'000; ++N) {
        const u64 r = r0(N);
        for (unsigned k : {2u, 3u}) ASSERT_EQ(count_signed_tuples(N, k), factorial(k) * binomial(4 * r, k)) << N;
    }
    for (u64 N = 1; N <= 1500; ++N) {
        for (unsigned k : {2u, 3u}) {
            u64 visited = 0;
            std::set<std::vector<Slot>> distinct;
            for_each_signed_tuple(N, k, [&](const std::vector<Slot>& s) {
                ++visited;
                distinct.insert(s);
            });
            ASSERT_EQ(BigInt(visited), count_signed_tuples(N, k));
            ASSERT_EQ(distinct.size(), visited);
        }
    }
}

TEST(PairProduct, Examples) {
    EXPECT_EQ(pair_product(kT130), -6000);
    EXPECT_EQ(pair_product(RepTuple(1, {{1, 0}, {0, 1}})), 0);
    EXPECT_EQ(kind_of([] { pair_product(RepTuple(130, {{3, 11}})); }), ErrorKind::invalid_argument);
    // Projectively degenerate slots: (m, n) and (-m, -n).
    EXPECT_EQ(pair_product(RepTuple(130, {{3, 11}, {-3, -11}})), 0);
}

TEST(NuP, Examples) {
    EXPECT_EQ(nu_p(kT130, 3), 5u);
    EXPECT_EQ(nu_p(kT130, 5), 9u);
    EXPECT_EQ(nu_p(kT130, 7), 25u);
    EXPECT_EQ(nu_p_projective(kT130, 3), 5u);
    EXPECT_EQ(nu_p_projective(kT130, 5), 9u);
    EXPECT_EQ(nu_p_projective(kT130, 7), 25u);
    EXPECT_THROW(nu_p(kT130, 9), Error);
}

TEST(NuP, PathsAgreeIncludingDegenerate) {
    const auto tuples = app::sample_coprime_tuples(60, 99);
    for (const auto& t : tuples)
        for (u64 p : oracle::trial_primes(101)) ASSERT_EQ(nu_p_exhaustive(t, p), nu_p_projective(t, p));
    const RepTuple non_coprime(25, {{0, 5}, {5, 0}, {3, 4}});
    for (u64 p : oracle::trial_primes(31)) EXPECT_EQ(nu_p_exhaustive(non_coprime, p), nu_p_projective(non_coprime, p));
    EXPECT_EQ(nu_p(non_coprime, 5), 25u);
}

TEST(ClassifyQp, Examples) {
    const auto d5 = classify_qp(kT130, 5);
    EXPECT_EQ(d5.which, DensityCase::divides_N);
    EXPECT_EQ(d5.q_p, 2u);
    const auto d7 = classify_qp(kT130, 7);
    EXPECT_EQ(d7.which, DensityCase::generic);
    EXPECT_EQ(d7.q_p, 4u);
    const auto d3 = classify_qp(kT130, 3);
    EXPECT_EQ(d3.which, DensityCase::divides_R_only);
    EXPECT_EQ(d3.q_p, 2u);
    EXPECT_EQ(d3.nu_p, 5u);
    EXPECT_EQ(kind_of([] { classify_qp(RepTuple(25, {{0, 5}, {3, 4}}), 3); }), ErrorKind::precondition_violation);
}

TEST(ClassifyQp, RandomCorpusInvariants) {
    const auto tuples = app::sample_coprime_tuples(200, 5);
    for (const auto& t : tuples) {
        const BigInt R = pair_product(t);
        for (u64 p : oracle::trial_primes(101)) {
            const auto d = classify_qp(t, p);
            ASSERT_EQ(nu_p_exhaustive(t, p), d.q_p * (p - 1) + 1);
            ASSERT_EQ(d.which == DensityCase::divides_N, t.norm() % p == 0);
            ASSERT_EQ(d.which == DensityCase::generic, t.norm() % p != 0 && R % p != 0);
        }
    }
}

TEST(Admissibility, Examples) {
    const auto a = is_admissible(kT130);
    ASSERT_TRUE(a.admissible);
    EXPECT_EQ(a.witness->assignments.at(2), 0u);
    EXPECT_EQ(a.witness->assignments.at(3), 1u);
    EXPECT_EQ(a.witness->assignments.at(5), 0u);
    EXPECT_TRUE(witness_valid(kT130, *a.witness));
    const auto b = is_admissible(kT5);
    EXPECT_FALSE(b.admissible);
    EXPECT_EQ(b.blocking_prime, 2u);
    EXPECT_EQ(kind_of([] { is_admissible(RepTuple(25, {{0, 5}, {3, 4}})); }), ErrorKind::precondition_violation);
}

TEST(Admissibility, FullCoverageMeansNuEqualsPSquared) {
    // Slots of N = 5 cover F_2 completely: nu_2 = 4.
    EXPECT_EQ(nu_p(kT5, 2), 4u);
    for (const auto& t : app::sample_coprime_tuples(300, 17, 20'000, 2, 6)) {
        bool full = false;
        for (u64 p : oracle::trial_primes(2 * t.k() + 2)) full = full || nu_p(t, p) == p * p;
        ASSERT_EQ(!full, is_admissible(t).admissible);
    }
}

TEST(Admissibility, AgreesWithBruteForceAndConventions) {
    for (const auto& t : app::sample_coprime_tuples(300, 23, 50'000, 2, 6)) {
        const bool def = is_admissible(t, SignConvention::minus_plus).admissible;
        ASSERT_EQ(def, brute_admissible(t, false));
        ASSERT_EQ(is_admissible(t, SignConvention::plus_minus).admissible, brute_admissible(t, true));
        ASSERT_EQ(def, is_admissible(t, SignConvention::plus_minus).admissible);
    }
}

TEST(AdmissibleSubset, Examples) {
    const auto s = admissible_subset(kT130);
    EXPECT_EQ(s.indices, (std::vector<std::size_t>{0, 1}));
    EXPECT_EQ(kind_of([] { admissible_subset(kT5); }), ErrorKind::precondition_violation);            // N odd
    EXPECT_EQ(kind_of([] { admissible_subset(kT130.restrict({0})); }), ErrorKind::precondition_violation);  // k = 1
}

TEST(AdmissibleSubset, EliminationDropsTheSlotKilledAtFive) {
    // At p = 5 the admissible residues are 0, 1, 4. (1, 0) is killed only by
    // j = 0; (1, 1) and (2, 2) are killed by j = 1 and j = 4. The smallest
    // discard set is {(1, 0)}.
    const std::vector<Slot> slots{{1, 1}, {1, 0}, {2, 2}};
    const auto s = greedy_elimination(slots, {5});
    EXPECT_EQ(s.indices, (std::vector<std::size_t>{0, 2}));
    EXPECT_EQ(s.witness.assignments.at(5), 0u);
    for (std::size_t i = 0; i < slots.size(); ++i) {
        const i64 m = slots[i].m, n = slots[i].n;
        const bool killed = (m * 0 - n) % 5 == 0 || (n * 0 + m) % 5 == 0;
        EXPECT_EQ(killed, i == 1);
    }
}

TEST(AdmissibleSubset, NoSlotIsEverKilledOnATwiceOddCircle) {
    // For coprime slots with 2 || N every slot meets the same residues modulo
    // 2, 3 and 5, so the greedy pass never has to discard there.
    for (u64 N = 2; N <= 60'000; N += 4) {
        const auto reps = canonical_reps(N, true);
        if (reps.size() < 2) continue;
        const auto s = admissible_subset(RepTuple(N, reps));
        ASSERT_EQ(s.indices.size(), reps.size()) << N;
    }
}

TEST(AdmissibleSubset, RestrictionAlwaysAdmissible) {
    for (const auto& t : app::sample_class_M_tuples(100, 3)) {
        const auto s = admissible_subset(t);
        ASSERT_FALSE(s.indices.empty());
        const auto kept = t.restrict(s.indices);
        const auto a = is_admissible(kept);
        ASSERT_TRUE(a.admissible);
        ASSERT_TRUE(witness_valid(kept, *a.witness));
        ASSERT_TRUE(brute_admissible(kept, false));
        ASSERT_EQ(a.admissible, is_admissible(kept, SignConvention::plus_minus).admissible);
    }
}

TEST(SingularSeries, ExampleAndStability) {
    const auto s = singular_series(kT130, 1'000'000);
    EXPECT_TRUE(s.admissible);
    EXPECT_GT(s.value, 0);
    EXPECT_EQ(s.cutoff_prime, 999'983u);
    // N R = 2^5 3 5^4 13.
    EXPECT_EQ(s.exceptional_primes, (std::vector<u64>{2, 3, 5, 13}));
    const auto d = singular_series(kT130, 2'000'000);
    EXPECT_LT(std::abs(d.value / s.value - 1), 1e-3);
    EXPECT_LE(std::abs(std::log(d.value / s.value)), s.tail_bound);
    EXPECT_NEAR(s.tail_bound, singular_tail_constant(2) / 1e6, 1e-15);
}

TEST(SingularSeries, ZeroExactlyWhenNotAdmissible) {
    EXPECT_EQ(singular_series(kT5, 100).value, 0);
    for (const auto& t : app::sample_coprime_tuples(150, 41, 20'000, 2, 5)) {
        try {
            const auto s = singular_series(t, 10'000);
            ASSERT_EQ(s.value == 0, !is_admissible(t).admissible);
            ASSERT_GE(s.value, 0);
        } catch (const Error& e) {
            ASSERT_EQ(e.kind(), ErrorKind::precondition_violation);
            ASSERT_EQ(pair_product(t), 0);
        }
    }
}

TEST(SingularSeries, PositiveLowerBoundOverCorpus) {
    double lo = 1e300;
    for (const auto& t : app::sample_class_M_tuples(40, 8)) {
        const auto s = singular_series(t, 100'000);
        ASSERT_TRUE(s.admissible);
        lo = std::min(lo, s.value);
    }
    EXPECT_GT(lo, 0);
    RecordProperty("min_singular_series", std::to_string(lo));
}

TEST(SingularSeries, MatchesDirectEulerProduct) {
    // Plain truncated product with exhaustive local densities, far enough out
    // to compare against the accelerated value.
    const auto table = build_prime_table(200'000);
    double log_direct = 0;
    for (u64 p : table.primes()) {
        const double pd = static_cast<double>(p);
        log_direct += std::log1p(-static_cast<double>(nu_p_projective(kT130, p)) / (pd * pd)) - 5 * std::log1p(-1 / pd);
    }
    const double accel = singular_series(kT130, 200'000).value;
    // The raw product converges like sum chi4(p)/p; allow that tail.
    EXPECT_NEAR(std::log(accel), log_direct, 5e-3);
}

TEST(SingularSeries, Errors) {
    EXPECT_EQ(kind_of([] { singular_series(kT130, 5); }), ErrorKind::invalid_argument);
    EXPECT_EQ(kind_of([] { singular_series(RepTuple(25, {{0, 5}, {3, 4}}), 100); }), ErrorKind::precondition_violation);
}

TEST(CountFk, Examples) {
    const RepTuple unit(1, {{1, 0}});
    EXPECT_EQ(count_fk(50, unit, false), 2u);
    EXPECT_EQ(count_fk(2, unit, false), 0u);
    EXPECT_EQ(count_fk(2, kT130, false), 0u);
    EXPECT_EQ(kind_of([&] { count_fk(1, unit, false); }), ErrorKind::invalid_argument);
    EXPECT_EQ(kind_of([&] { count_fk(kFactorizeLimit + 1, unit, false); }), ErrorKind::unsupported_range);
}

TEST(CountFk, AgreesWithDoubleLoopsBothOrders) {
    const RepTuple unit(1, {{1, 0}});
    const RepTuple t13(13, {{2, 3}});
    const RepTuple t65(65, {{1, 8}, {4, 7}});
    for (const RepTuple* t : {&unit, &t13, &t65, &kT130}) {
        for (u64 z : {1'000ULL, 40'000ULL}) {
            for (bool star : {false, true}) {
                const u64 fast = count_fk(z, *t, star, {3});
                ASSERT_EQ(fast, oracle::fk_double_loop(z, *t, star, false)) << t->norm() << " " << z;
                ASSERT_EQ(fast, oracle::fk_double_loop(z, *t, star, true)) << t->norm() << " " << z;
            }
            ASSERT_LE(count_fk(z, *t, true), count_fk(z, *t, false));
        }
    }
}

TEST(CountFk, LargeZUsesTableAndStaysDeterministic) {
    const u64 a = count_fk(1'000'000, kT130, false, {1});
    EXPECT_EQ(a, count_fk(1'000'000, kT130, false, {4}));
    EXPECT_EQ(a, oracle::fk_double_loop(1'000'000, kT130, false, false));
    EXPECT_EQ(count_fk(2'000'000, kT130, false, {1}), count_fk(2'000'000, kT130, false, {2}));
}

TEST(SieveRatio, ReportsAndGuards) {
    for (u64 z : {10'000ULL, 100'000ULL, 1'000'000ULL}) {
        const auto r = sieve_ratio(z, kT130);
        EXPECT_GE(r.ratio, 0) << z;
        EXPECT_TRUE(std::isfinite(r.ratio));
        EXPECT_EQ(r.f_k, count_fk(z, kT130, false));
    }
    EXPECT_GT(sieve_ratio(1'000'000, kT130).f_k, 0u);
    // Odd N is always blocked at p = 2, so the ratio has no denominator.
    EXPECT_EQ(kind_of([] { sieve_ratio(1'000, RepTuple(1, {{1, 0}})); }), ErrorKind::division_guard);
    EXPECT_EQ(kind_of([] { sieve_ratio(1'000, kT5); }), ErrorKind::division_guard);
    EXPECT_EQ(kind_of([] { sieve_ratio(2, kT130); }), ErrorKind::invalid_argument);
}

TEST(Corpus, RoundTripAndLineErrors) {
    std::istringstream in("# comment\n130 2 3 11 7 9\n\n5 2 1 2 2 1  # trailing\n");
    const auto tuples = read_corpus(in);
    ASSERT_EQ(tuples.size(), 2u);
    EXPECT_EQ(tuples[0], kT130);
    EXPECT_EQ(tuples[1], kT5);
    std::ostringstream out;
    write_corpus(tuples, out);
    EXPECT_EQ(out.str(), "130 2 3 11 7 9\n5 2 1 2 2 1\n");

    auto error_line = [](const std::string& text) -> std::string {
        std::istringstream s(text);
        try {
            read_corpus(s);
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::format_error);
            return e.what();
        }
        return "accepted";
    };
    EXPECT_NE(error_line("130 2 3 11 7 9\n130 2 3 11 7\n").find("line 2"), std::string::npos);
    EXPECT_NE(error_line("\n\n130 2 3 11 7 x\n").find("line 3"), std::string::npos);
    EXPECT_NE(error_line("130 2 3 11 7 8\n").find("line 1"), std::string::npos);
    EXPECT_NE(error_line("130 2 3 11 3 11\n").find("line 1"), std::string::npos);
    EXPECT_NE(error_line("130 0\n").find("line 1"), std::string::npos);
    std::istringstream empty("");
    EXPECT_TRUE(read_corpus(empty).empty());
}

TEST(SingularCsv, ReportRows) {
    const RepTuple dup(130, {{3, 11}, {-3, -11}});
    const auto rows = singular_report({kT130, kT5, dup}, 1000);
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[0].status, "ok");
    EXPECT_TRUE(rows[0].admissible);
    EXPECT_EQ(rows[1].status, "non-admissible");
    EXPECT_EQ(rows[1].series->value, 0);
    EXPECT_EQ(rows[2].status, "degenerate");
    EXPECT_EQ(rows[0].count_divides_N, 3u);  // 2, 5, 13
    EXPECT_EQ(rows[0].count_divides_R_only, 1u);  // 3
    std::ostringstream s;
    write_singular_csv(rows, s);
    const std::string csv = s.str();
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "N,k,tuple_id,S,cutoff,tail_bound,admissible,status,divides_N,generic,divides_R_only");
    EXPECT_NE(csv.find("\n5,2,2,0,1000,"), std::string::npos);
}
