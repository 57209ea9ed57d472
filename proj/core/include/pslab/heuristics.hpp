#pragma once

#include <string>

#include "pslab/arith.hpp"

namespace pslab {

struct ClosedFormConstants {
    double lambda;  // 2 / log 2
    double delta;   // 1 - (1 + log log 2) / log 2
    double tau;     // log(1 / log 2) / log 2
};

ClosedFormConstants closed_form_constants() noexcept;

struct HeuristicConstants {
    double lambda = 0;
    double delta = 0;
    double tau = 0;
    double c_lambda = 0;
    double rho = 0;          // 8 c_lambda
    double kappa_tilde = 0;  // c_lambda sqrt((2 lambda)^3 / pi)
    u64 prime_cutoff = 0;    // number of primes in the truncated product
    u64 largest_prime = 0;
    std::string acceleration;
    // Plain truncation over the same primes, for comparison.
    double c_lambda_raw = 0;
    // Relative change of c_lambda between prime_cutoff / 2 and prime_cutoff.
    double sensitivity = 0;
    double sensitivity_raw = 0;
};

// Constants from the product over the first prime_cutoff primes, with the
// L(1, chi4)^lambda compensation. prime_cutoff >= 1000.
HeuristicConstants euler_c_lambda(u64 prime_cutoff, unsigned workers = 1);

struct SeriesValue {
    double value = 0;
    double remainder_bound = 0;  // bound on the omitted tails
};

// sum_{k_lo <= k <= k_hi} (2^k beta)^R exp(-2^k beta), R > 0, beta > 0.
SeriesValue f_R_window(double R, double beta, int k_lo, int k_hi);
// Symmetric window |k| <= halfwidth.
SeriesValue f_R(double R, double beta, int halfwidth);

struct PhiEvaluation {
    unsigned r = 0;
    double t = 0;
    double value = 0;
    int truncation_halfwidth = 0;
    double truncation_error = 0;
};

// (kappa / r!) sum_k (2^k beta)^{r - 2 - tau} exp(-2^k beta), beta = 2^{1 - t}; r >= 3.
PhiEvaluation phi_r(unsigned r, double t, int halfwidth, double kappa_tilde);

// f_{r-2-tau}(beta) - f_{r-1-tau}(beta) / (r + 1) at beta = r - 1 - tau.
// Positive means phi_r > phi_{r+1} at that phase.
double phi_crossing_margin(unsigned r, int halfwidth = 64);

enum class Quantity { N1, N2, Nr, Sk_order, moment_k_exponent };

struct PredictParams {
    double x = 0;
    unsigned k = 0;
    unsigned r = 0;
    const HeuristicConstants* constants = nullptr;  // needed for N2 and Nr
    int halfwidth = 64;
};

double predict(Quantity quantity, const PredictParams& params);

// 2^{k-1} - 2k - 1, exact.
i64 moment_k_exponent(unsigned k);

}  // namespace pslab
