#pragma once

#include <optional>

namespace qb {

// Black-Scholes prices written on the forward F with discount factor D = 1/R_f and
// maturity T in years.
double bs_put(double F, double K, double T, double sigma, double D);
double bs_call(double F, double K, double T, double sigma, double D);

// Put-call parity: C - P = D (F - K).
double put_from_call(double call, double F, double K, double D);
double call_from_put(double put, double F, double K, double D);

struct ImpliedVolOptions {
    double lo = 1e-6;
    double hi = 5.0;
    double tol = 1e-8;
    int max_iter = 200;
};

// Bisection on the put price. Empty when the price lies outside the attainable range.
std::optional<double> implied_vol_put(double price, double F, double K, double T, double D,
                                      const ImpliedVolOptions& opt = {});

}  // namespace qb
