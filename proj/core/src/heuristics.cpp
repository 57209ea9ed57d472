#include "pslab/heuristics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <thread>
#include <vector>

#include "pslab/error.hpp"
#include "pslab/prime_engine.hpp"

namespace pslab {

namespace {

// Neumaier summation.
struct CompensatedSum {
    double sum = 0;
    double comp = 0;

    void add(double v) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v)) {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    double value() const { return sum + comp; }
};

constexpr std::size_t kBlockPrimes = 1 << 16;

struct LogProducts {
    double accelerated = 0;
    double raw = 0;
};

// Log of the c_lambda Euler factors over primes[0, count), in fixed blocks
// combined in block order so the result does not depend on the worker count.
LogProducts log_euler_factors(const std::vector<u64>& primes, std::size_t count, double lambda, unsigned workers) {
    const std::size_t blocks = (count + kBlockPrimes - 1) / kBlockPrimes;
    std::vector<LogProducts> partial(blocks);
    auto run_block = [&](std::size_t b) {
        CompensatedSum acc, raw;
        const std::size_t hi = std::min(count, (b + 1) * kBlockPrimes);
        for (std::size_t i = b * kBlockPrimes; i < hi; ++i) {
            const u64 p = primes[i];
            if (p == 2) continue;
            const double pd = static_cast<double>(p);
            double term = lambda * std::log1p(-1.0 / pd);
            if (p % 4 == 1) term += std::log1p(2.0 * lambda / (pd - 1.0));
            raw.add(term);
            acc.add(term + lambda * std::log1p(-static_cast<double>(chi4(static_cast<i64>(p))) / pd));
        }
        partial[b] = {acc.value(), raw.value()};
    };
    const unsigned w = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(blocks)));
    if (w <= 1) {
        for (std::size_t b = 0; b < blocks; ++b) run_block(b);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < w; ++t) {
            pool.emplace_back([&, t] {
                for (std::size_t b = t; b < blocks; b += w) run_block(b);
            });
        }
        for (auto& th : pool) th.join();
    }
    CompensatedSum acc, raw;
    for (const auto& p : partial) {
        acc.add(p.accelerated);
        raw.add(p.raw);
    }
    return {acc.value(), raw.value()};
}

double log_gamma_prefactor(double lambda) {
    return std::log(3.0) - (lambda + 2.0) * std::log(2.0) - std::log(std::tgamma(lambda + 1.0));
}

double peak_term(double R, double u) { return std::exp(R * std::log(u) - u); }

}  // namespace

ClosedFormConstants closed_form_constants() noexcept {
    const double ln2 = std::numbers::ln2;
    return {2.0 / ln2, 1.0 - (1.0 + std::log(ln2)) / ln2, std::log(1.0 / ln2) / ln2};
}

HeuristicConstants euler_c_lambda(u64 prime_cutoff, unsigned workers) {
    if (prime_cutoff < 1000) fail(ErrorKind::invalid_argument, "euler_c_lambda: prime_cutoff must be >= 1000");
    const ClosedFormConstants cf = closed_form_constants();
    const PrimeTable table = build_prime_table(nth_prime_upper_bound(prime_cutoff), {.workers = workers});
    const auto& primes = table.primes();
    if (primes.size() < prime_cutoff) fail(ErrorKind::resource_limit, "euler_c_lambda: sieve bound too small");

    const double lambda = cf.lambda;
    const double pre = log_gamma_prefactor(lambda);
    // prod_p (1 - chi4(p)/p)^{-lambda} = L(1, chi4)^lambda = (pi/4)^lambda.
    const double compensator = lambda * std::log(std::numbers::pi / 4.0);

    const LogProducts full = log_euler_factors(primes, prime_cutoff, lambda, workers);
    const LogProducts half = log_euler_factors(primes, prime_cutoff / 2, lambda, workers);

    HeuristicConstants c;
    c.lambda = lambda;
    c.delta = cf.delta;
    c.tau = cf.tau;
    c.prime_cutoff = prime_cutoff;
    c.largest_prime = primes[prime_cutoff - 1];
    c.acceleration = "chi4-compensated: factors times (1 - chi4(p)/p)^lambda, global (pi/4)^lambda";
    c.c_lambda = std::exp(pre + full.accelerated + compensator);
    c.c_lambda_raw = std::exp(pre + full.raw);
    const double c_half = std::exp(pre + half.accelerated + compensator);
    const double c_half_raw = std::exp(pre + half.raw);
    c.sensitivity = std::abs(c.c_lambda - c_half) / c.c_lambda;
    c.sensitivity_raw = std::abs(c.c_lambda_raw - c_half_raw) / c.c_lambda_raw;
    c.rho = 8.0 * c.c_lambda;
    c.kappa_tilde = c.c_lambda * std::sqrt(std::pow(2.0 * lambda, 3) / std::numbers::pi);
    return c;
}

SeriesValue f_R_window(double R, double beta, int k_lo, int k_hi) {
    if (!(R > 0)) fail(ErrorKind::out_of_domain, "f_R: R must be > 0 (the sum diverges for R <= 0)");
    if (!(beta > 0)) fail(ErrorKind::out_of_domain, "f_R: beta must be > 0");
    if (k_lo > k_hi) fail(ErrorKind::invalid_argument, "f_R: empty index window");

    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(k_hi - k_lo + 1));
    double peak = 0;
    for (int k = k_lo; k <= k_hi; ++k) {
        const double t = peak_term(R, std::ldexp(beta, k));
        terms.push_back(t);
        peak = std::max(peak, t);
    }
    // Sum from the largest term down; terms below 1e-30 relative are dropped.
    std::sort(terms.begin(), terms.end(), std::greater<>());
    CompensatedSum s;
    for (double t : terms) {
        if (t < 1e-30 * peak) break;
        s.add(t);
    }

    // Lower tail: terms <= (2^k beta)^R, geometric with ratio 2^{-R}.
    const double ratio_lo = std::exp2(-R);
    const double lower = std::exp(R * std::log(std::ldexp(beta, k_lo - 1))) / (1.0 - ratio_lo);
    // Upper tail: term(k+1)/term(k) = 2^R exp(-2^k beta), decreasing in k.
    double upper = std::numeric_limits<double>::infinity();
    const double u_next = std::ldexp(beta, k_hi + 1);
    const double ratio_hi = std::exp(R * std::numbers::ln2 - u_next);
    if (ratio_hi < 1.0) upper = peak_term(R, u_next) / (1.0 - ratio_hi);
    return {s.value(), lower + upper};
}

SeriesValue f_R(double R, double beta, int halfwidth) {
    if (halfwidth < 1) fail(ErrorKind::invalid_argument, "f_R: halfwidth must be >= 1");
    return f_R_window(R, beta, -halfwidth, halfwidth);
}

PhiEvaluation phi_r(unsigned r, double t, int halfwidth, double kappa_tilde) {
    if (r < 3) fail(ErrorKind::out_of_domain, "phi_r: defined for r >= 3");
    const double tau = closed_form_constants().tau;
    const double beta = std::exp2(1.0 - t);
    const SeriesValue s = f_R(static_cast<double>(r) - 2.0 - tau, beta, halfwidth);
    const double scale = kappa_tilde / std::tgamma(static_cast<double>(r) + 1.0);
    return {r, t, scale * s.value, halfwidth, scale * s.remainder_bound};
}

double phi_crossing_margin(unsigned r, int halfwidth) {
    if (r < 3) fail(ErrorKind::out_of_domain, "phi_crossing_margin: r >= 3");
    const double tau = closed_form_constants().tau;
    const double rd = static_cast<double>(r);
    const double beta = rd - 1.0 - tau;
    return f_R(rd - 2.0 - tau, beta, halfwidth).value - f_R(rd - 1.0 - tau, beta, halfwidth).value / (rd + 1.0);
}

i64 moment_k_exponent(unsigned k) {
    if (k < 1 || k > 62) fail(ErrorKind::out_of_domain, "moment_k_exponent: k in [1, 62]");
    return (i64{1} << (k - 1)) - 2 * static_cast<i64>(k) - 1;
}

double predict(Quantity quantity, const PredictParams& params) {
    const bool asymptotic = quantity != Quantity::moment_k_exponent;
    if (asymptotic && params.x < 16) fail(ErrorKind::out_of_domain, "predict: x >= 16 required");
    const double x = params.x;
    const double L = std::log(x);
    switch (quantity) {
        case Quantity::N1:
            return std::numbers::pi / 2.0 * x / (L * L);
        case Quantity::N2:
            if (!params.constants) fail(ErrorKind::invalid_argument, "predict(N2): constants required");
            return params.constants->rho * x / (L * L * L);
        case Quantity::Nr: {
            if (!params.constants) fail(ErrorKind::invalid_argument, "predict(Nr): constants required");
            if (params.r < 3) fail(ErrorKind::out_of_domain, "predict(Nr): r >= 3");
            const double LL = std::log(L);
            const double t = 2.0 * LL / std::numbers::ln2;
            const double phi = phi_r(params.r, t, params.halfwidth, params.constants->kappa_tilde).value;
            return phi * x / (std::pow(L, 3.0 + 2.0 * params.constants->delta) * std::sqrt(LL));
        }
        case Quantity::Sk_order:
            if (params.k < 1) fail(ErrorKind::out_of_domain, "predict(Sk_order): k >= 1");
            return x * std::pow(L, static_cast<double>(moment_k_exponent(params.k)));
        case Quantity::moment_k_exponent:
            if (params.k < 1) fail(ErrorKind::out_of_domain, "predict(moment_k_exponent): k >= 1");
            return static_cast<double>(moment_k_exponent(params.k));
    }
    fail(ErrorKind::invalid_argument, "predict: unknown quantity");
}

}  // namespace pslab
