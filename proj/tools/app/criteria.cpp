#include "criteria.hpp"

#include <sys/resource.h>

#include <array>
#include <chrono>
#include <cmath>
#include <exception>
#include <numbers>
#include <sstream>

#include "oracles.hpp"
#include "pslab/heuristics.hpp"
#include "pslab/moment_lab.hpp"
#include "pslab/representations.hpp"
#include "pslab/sieve_theory.hpp"
#include "sampling.hpp"

namespace pslab::app {

namespace {

using Clock = std::chrono::steady_clock;

std::string str(const BigInt& v) { return v.str(); }

std::string fmt(double v, int precision = 6) {
    std::ostringstream s;
    s.imbue(std::locale::classic());
    s.precision(precision);
    s << v;
    return s.str();
}

struct Context {
    const CriteriaOptions& options;
    std::optional<HeuristicConstants> constants;
    std::map<u64, RepMultiplicityMap> maps;

    const HeuristicConstants& reference_constants() {
        if (!constants) constants = euler_c_lambda(1'000'000, options.threads);
        return *constants;
    }

    const RepMultiplicityMap& map(u64 x) {
        auto it = maps.find(x);
        if (it != maps.end()) return it->second;
        SweepConfig cfg;
        cfg.x = x;
        cfg.worker_count = options.threads;
        cfg.cache_dir = options.cache_dir;
        return maps.emplace(x, load_or_sweep(cfg).map).first->second;
    }
};

struct Outcome {
    bool passed;
    std::string detail;
};

// 1: sum of r2 over the map against a direct double loop.
Outcome pair_identity(Context& ctx) {
    const u64 x = 1'000'000;
    const auto& map = ctx.map(x);
    const BigInt from_map = raw_moment(map, 1).value;
    const u64 direct = oracle::ordered_prime_pairs(x);
    return {from_map == direct, "sum r2 = " + str(from_map) + ", direct = " + std::to_string(direct)};
}

// 2: r2 = 2 R2 + [n = 2p^2] pointwise for n <= 1e5.
Outcome splitting_identity(Context& ctx) {
    const u64 x = 100'000;
    const auto& map = ctx.map(x);
    u64 mismatches = 0, checked = 0, first_bad = 0;
    for (u64 n = 1; n <= x; ++n) {
        const RepEntry* e = map.find(n);
        const u64 point_r2 = r2(n);
        const u64 point_R2 = R2(n);
        const bool twice = is_twice_prime_square(n);
        const u64 sweep_r2 = e ? e->r2() : 0;
        const u64 sweep_R2 = e ? e->R2 : 0;
        const bool ok = point_r2 == 2 * point_R2 + (twice ? 1 : 0) && point_r2 == sweep_r2 && point_R2 == sweep_R2 &&
                        (e ? e->is_2p2 : false) == twice;
        ++checked;
        if (!ok && mismatches++ == 0) first_bad = n;
    }
    std::string d = std::to_string(checked) + " values checked, " + std::to_string(mismatches) + " mismatches";
    if (mismatches) d += ", first at n = " + std::to_string(first_bad);
    return {mismatches == 0, d};
}

// 3: sum R2^k = sum_l S(k, l) S_l for k <= 6.
Outcome stirling_decomposition(Context& ctx) {
    const auto& map = ctx.map(1'000'000);
    std::vector<BigInt> falling;
    bool ok = true;
    std::string d;
    for (unsigned k = 1; k <= 6; ++k) {
        falling.push_back(falling_sum(map, k).value);
        const BigInt lhs = power_sum_R2(map, k).value;
        const BigInt rhs = stirling_convert(falling, k);
        ok = ok && lhs == rhs;
        if (k == 6) d = "k = 6: " + str(lhs) + " vs " + str(rhs);
        if (lhs != rhs) d = "k = " + std::to_string(k) + ": " + str(lhs) + " vs " + str(rhs);
        if (lhs != rhs) break;
    }
    return {ok, d};
}

// 4: ordered signed k-tuples = k! C(4 r0(N), k).
Outcome tuple_count_identity(Context&) {
    u64 mismatches = 0, first_bad = 0, enumerated = 0;
    for (u64 N = 1; N <= 100'000; ++N) {
        const u64 r = r0(N);
        for (unsigned k : {2u, 3u}) {
            const BigInt expected = factorial(k) * binomial(4 * r, k);
            const BigInt counted = count_signed_tuples(N, k);
            bool ok = counted == expected;
            if (N <= 2'000) {
                u64 visited = 0;
                for_each_signed_tuple(N, k, [&](const std::vector<Slot>&) { ++visited; });
                ok = ok && visited == counted;
                ++enumerated;
            }
            if (!ok && mismatches++ == 0) first_bad = N;
        }
    }
    std::string d = "N <= 100000, k in {2, 3}, " + std::to_string(enumerated) + " cases materialized, " +
                    std::to_string(mismatches) + " mismatches";
    if (mismatches) d += ", first at N = " + std::to_string(first_bad);
    return {mismatches == 0, d};
}

// 5: exhaustive nu_p = q_p (p - 1) + 1 with the right case tag.
Outcome local_density(Context& ctx) {
    const auto tuples = sample_coprime_tuples(200, ctx.options.seed);
    const auto primes = oracle::trial_primes(101);
    u64 checks = 0, bad = 0;
    std::string first;
    for (const auto& t : tuples) {
        const BigInt R = pair_product(t);
        for (u64 p : primes) {
            const LocalDensity d = classify_qp(t, p);
            const u64 exhaustive = nu_p_exhaustive(t, p);
            const int chi = chi4(static_cast<i64>(p));
            const i64 q = static_cast<i64>(d.q_p), k = static_cast<i64>(t.k());
            const bool divN = t.norm() % p == 0;
            const bool divR = R % p == 0;
            DensityCase expected = divN ? DensityCase::divides_N : (divR ? DensityCase::divides_R_only : DensityCase::generic);
            bool ok = exhaustive == d.q_p * (p - 1) + 1 && d.which == expected;
            if (d.which == DensityCase::divides_N) ok = ok && q == 1 + chi;
            if (d.which == DensityCase::generic) ok = ok && q == 2 * k + 1 + chi;
            if (d.which == DensityCase::divides_R_only) ok = ok && 3 + chi <= q && q < 2 * k + 1 + chi;
            ++checks;
            if (!ok && bad++ == 0)
                first = "N = " + std::to_string(t.norm()) + ", p = " + std::to_string(p) + ", nu = " +
                        std::to_string(exhaustive) + ", q = " + std::to_string(d.q_p) + ", case " +
                        std::string(to_string(d.which));
        }
    }
    std::string d = std::to_string(tuples.size()) + " tuples x " + std::to_string(primes.size()) + " primes, " +
                    std::to_string(bad) + " failures";
    if (bad) d += "; first: " + first;
    return {bad == 0 && checks == tuples.size() * primes.size(), d};
}

// 6: D_2 from the map against a 4-fold loop over primes <= 100.
Outcome d2_oracle(Context& ctx) {
    const u64 x = 10'000;
    const BigInt fast = nondiagonal_count(ctx.map(x), 2).value;
    const u64 brute = oracle::nondiagonal_pairs_4loop(x, 100);
    return {fast == brute, "D_2 = " + str(fast) + ", brute force = " + std::to_string(brute)};
}

// 7: closed forms by truncation, Euler product constants within 2%.
Outcome constants_check(Context& ctx) {
    const auto cf = closed_form_constants();
    const auto& hc = ctx.reference_constants();
    const bool delta_ok = std::floor(cf.delta * 1e6) == 86071.0;
    const bool tau_ok = std::floor(cf.tau * 1e4) == 5287.0;
    const double rho_dev = std::abs(hc.rho / 0.0282 - 1.0);
    const double kappa_dev = std::abs(hc.kappa_tilde / 0.02761 - 1.0);
    const bool ok = delta_ok && tau_ok && rho_dev < 0.02 && kappa_dev < 0.02;
    return {ok, "delta = " + fmt(cf.delta, 10) + ", tau = " + fmt(cf.tau, 10) + ", rho = " + fmt(hc.rho) + " (" +
                    fmt(100 * rho_dev, 3) + "%), kappa = " + fmt(hc.kappa_tilde) + " (" + fmt(100 * kappa_dev, 3) +
                    "%) over " + std::to_string(hc.prime_cutoff) + " primes"};
}

// 8: exponent table k = 1..14.
Outcome exponent_table(Context&) {
    constexpr std::array<i64, 14> table{-2, -3, -3, -1, 5, 19, 49, 111, 237, 491, 1001, 2023, 4069, 8163};
    unsigned bad = 0;
    for (unsigned k = 1; k <= 14; ++k) {
        bad += moment_k_exponent(k) != table[k - 1];
        bad += static_cast<i64>(predict(Quantity::moment_k_exponent, {0, k, 0, nullptr, 64})) != table[k - 1];
    }
    return {bad == 0, "14 entries, " + std::to_string(bad) + " mismatches"};
}

struct TrendPoint {
    double m1, m2, m3, n1, n2;
};

TrendPoint trend_point(Context& ctx, u64 x) {
    const auto& map = ctx.map(x);
    const double xd = static_cast<double>(x), L = std::log(xd), pi = std::numbers::pi;
    const auto mf = mass_function(map);
    auto count = [&](u64 r) {
        auto it = mf.rows.find(r);
        return it == mf.rows.end() ? 0.0 : static_cast<double>(it->second);
    };
    return {raw_moment(map, 1).value.convert_to<double>() * L * L / (pi * xd),
            raw_moment(map, 2).value.convert_to<double>() / (2 * pi * xd / (L * L)),
            raw_moment(map, 3).value.convert_to<double>() / (4 * pi * xd / (L * L)),
            count(1) * 2 * L * L / (pi * xd),
            count(2) * L * L * L / xd};
}

Outcome first_moment_trend(Context& ctx) {
    const auto a = trend_point(ctx, 1'000'000), b = trend_point(ctx, 100'000'000);
    const double da = std::abs(a.m1 - 1), db = std::abs(b.m1 - 1);
    return {db < da && db < 0.4, "deviation " + fmt(da) + " at 1e6, " + fmt(db) + " at 1e8"};
}

Outcome higher_moment_trend(Context& ctx) {
    const auto a = trend_point(ctx, 1'000'000), b = trend_point(ctx, 100'000'000);
    const bool ok = std::abs(b.m2 - 1) < std::abs(a.m2 - 1) && std::abs(b.m3 - 1) < std::abs(a.m3 - 1);
    return {ok, "second " + fmt(a.m2) + " -> " + fmt(b.m2) + ", third " + fmt(a.m3) + " -> " + fmt(b.m3)};
}

Outcome mass_function_trend(Context& ctx) {
    const auto a = trend_point(ctx, 1'000'000), b = trend_point(ctx, 100'000'000);
    const double rho = ctx.reference_constants().rho;
    const bool ok = std::abs(b.n1 - 1) < std::abs(a.n1 - 1);
    return {ok, "N1 ratio " + fmt(a.n1) + " -> " + fmt(b.n1) + "; N2 log^3 x / x " + fmt(a.n2) + " -> " + fmt(b.n2) +
                    " against rho " + fmt(rho) + " (diagnostic)"};
}

// 12: admissible subsets and agreement of the two sign conventions.
Outcome admissibility_suite(Context& ctx) {
    const auto tuples = sample_class_M_tuples(100, ctx.options.seed);
    unsigned bad = 0, trimmed = 0;
    std::string first;
    for (const auto& t : tuples) {
        const bool hyp = r0(t.norm()) >= 8 && factorize(t.norm()).squarefree() && t.norm() % 4 == 2;
        const auto sub = admissible_subset(t);
        const RepTuple kept = t.restrict(sub.indices);
        const auto adm = is_admissible(kept);
        const bool agree = is_admissible(t, SignConvention::minus_plus).admissible ==
                               is_admissible(t, SignConvention::plus_minus).admissible &&
                           adm.admissible == is_admissible(kept, SignConvention::plus_minus).admissible;
        const bool ok = hyp && !sub.indices.empty() && adm.admissible && witness_valid(kept, *adm.witness) && agree;
        if (sub.indices.size() < t.k()) ++trimmed;
        if (!ok && bad++ == 0) first = "N = " + std::to_string(t.norm());
    }
    std::string d = std::to_string(tuples.size()) + " tuples, " + std::to_string(trimmed) + " trimmed, " +
                    std::to_string(bad) + " failures";
    if (bad) d += "; first: " + first;
    return {bad == 0, d};
}

Outcome phi_periodicity(Context& ctx) {
    const double kappa = ctx.reference_constants().kappa_tilde;
    double worst = 0;
    for (unsigned r = 3; r <= 10; ++r)
        for (int i = 0; i < 32; ++i) {
            const double t = i / 32.0;
            const double a = phi_r(r, t, 64, kappa).value, b = phi_r(r, t + 1, 64, kappa).value;
            worst = std::max(worst, std::abs(a - b));
        }
    return {worst < 1e-9, "max |phi_r(t + 1) - phi_r(t)| = " + fmt(worst, 3)};
}

Outcome f_R_doubling(Context&) {
    unsigned bad = 0, cases = 0;
    for (double R : {0.5, 1.0, 2.0, 3.5, 8.0, 16.0, 32.0, 40.0})
        for (int i = 0; i < 16; ++i) {
            const double beta = 1.0 + i / 16.0;
            const auto a = f_R_window(R, beta, -64, 64);
            const auto b = f_R_window(R, 2 * beta, -65, 63);
            bad += a.value != b.value;
            ++cases;
        }
    return {bad == 0, std::to_string(cases) + " cases, " + std::to_string(bad) + " not bit-identical"};
}

Outcome f_R_peak_ratio(Context&) {
    bool ok = true;
    std::string d;
    for (double R : {8.0, 16.0, 32.0}) {
        const double ratio = f_R(R, R, 64).value / std::exp(R * std::log(R) - R);
        ok = ok && ratio >= 0.5 && ratio <= 1.0;
        d += (d.empty() ? "" : ", ") + std::string("R = ") + fmt(R, 3) + ": " + fmt(ratio);
    }
    return {ok, "f_R(R, R) / (R^R e^-R): " + d};
}

// 14: byte-identical maps across worker counts.
Outcome determinism(Context&) {
    std::string reference;
    std::string d;
    bool ok = true;
    for (unsigned w : {1u, 4u, 8u}) {
        SweepConfig cfg;
        cfg.x = 10'000'000;
        cfg.worker_count = w;
        const std::string bytes = serialize_map(sweep_prime_pairs(cfg));
        if (reference.empty()) {
            reference = bytes;
        } else {
            ok = ok && bytes == reference;
        }
    }
    return {ok, "x = 1e7, workers 1/4/8, " + std::to_string(reference.size()) + " bytes each"};
}

double peak_rss_bytes() {
    rusage u{};
    getrusage(RUSAGE_SELF, &u);
    return static_cast<double>(u.ru_maxrss) * 1024.0;
}

Outcome performance(Context& ctx) {
    SweepConfig cfg;
    cfg.x = 1'000'000'000;
    cfg.worker_count = std::max(ctx.options.threads, 1u);
    const auto start = Clock::now();
    const auto map = sweep_prime_pairs(cfg);
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    const double rss = peak_rss_bytes();
    const bool ok = secs < 120 && rss < 4.0 * (1u << 30);
    return {ok, "x = 1e9 on " + std::to_string(cfg.worker_count) + " workers: " + fmt(secs, 3) + " s, peak RSS " +
                    fmt(rss / (1u << 20), 5) + " MiB, " + std::to_string(map.size()) + " entries"};
}

struct CriterionDef {
    const char* id;
    const char* title;
    double budget;
    bool soft;
    bool heavy;
    Outcome (*run)(Context&);
};

constexpr CriterionDef kCriteria[] = {
    {"1", "pair identity at x = 1e6", 5, false, false, pair_identity},
    {"2", "splitting identity for n <= 1e5", 10, false, false, splitting_identity},
    {"3", "Stirling decomposition, k <= 6, x = 1e6", 5, false, false, stirling_decomposition},
    {"4", "signed tuple count, N <= 1e5", 30, false, false, tuple_count_identity},
    {"5", "local density classification, p <= 101", 60, false, false, local_density},
    {"6", "D_2 against 4-tuple enumeration, x = 1e4", 5, false, false, d2_oracle},
    {"7", "constants delta, tau, rho, kappa", 30, false, false, constants_check},
    {"8", "exponent table k = 1..14", 1, false, false, exponent_table},
    {"9", "first moment trend 1e6 -> 1e8", 180, false, true, first_moment_trend},
    {"10", "second and third moment trend", 180, false, true, higher_moment_trend},
    {"11", "mass function N1 trend", 180, false, true, mass_function_trend},
    {"12", "admissible subsets and sign conventions", 60, false, false, admissibility_suite},
    {"13a", "phi_r periodicity, halfwidth 64, r = 3..10", 10, false, false, phi_periodicity},
    {"13b", "f_R doubling under shifted truncation", 10, false, false, f_R_doubling},
    {"13c", "f_R(R, R) / (R^R e^-R) in [0.5, 1.0]", 10, false, false, f_R_peak_ratio},
    {"14", "sweep determinism across workers", 60, false, true, determinism},
    {"15", "sweep performance at x = 1e9", 120, true, true, performance},
};

}  // namespace

std::vector<CriterionResult> run_criteria(const CriteriaOptions& options) {
    Context ctx{options, std::nullopt, {}};
    std::vector<CriterionResult> results;
    for (const auto& def : kCriteria) {
        CriterionResult r;
        r.id = def.id;
        r.title = def.title;
        r.soft = def.soft;
        r.budget_seconds = def.budget;
        if (options.quick && def.heavy) {
            r.skipped = true;
            r.detail = "skipped in quick mode";
        } else {
            const auto start = Clock::now();
            try {
                const Outcome o = def.run(ctx);
                r.passed = o.passed;
                r.detail = o.detail;
            } catch (const std::exception& e) {
                r.passed = false;
                r.detail = std::string("exception: ") + e.what();
            }
            r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
            if (r.seconds > r.budget_seconds) {
                r.passed = false;
                r.detail += "; over the " + fmt(r.budget_seconds, 4) + " s budget";
            }
        }
        if (options.on_result) options.on_result(r);
        results.push_back(std::move(r));
    }
    return results;
}

std::string format_result_line(const CriterionResult& r) {
    const char* tag = r.skipped ? "SKIP" : (r.passed ? "PASS" : (r.soft ? "WARN" : "FAIL"));
    std::ostringstream s;
    s.imbue(std::locale::classic());
    s << '[' << tag << "] criterion " << r.id << ": " << r.title << " | " << r.detail;
    if (!r.skipped) s << " (" << fmt(r.seconds, 3) << " s)";
    return s.str();
}

bool all_hard_passed(const std::vector<CriterionResult>& results) {
    for (const auto& r : results)
        if (!r.skipped && !r.soft && !r.passed) return false;
    return true;
}

}  // namespace pslab::app
