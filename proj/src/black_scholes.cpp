#include "qbound/black_scholes.hpp"

#include <algorithm>
#include <cmath>

#include "qbound/numerics.hpp"

namespace qb {

double bs_put(double F, double K, double T, double sigma, double D) {
    double sd = sigma * std::sqrt(T);
    if (sd <= 0) return D * std::max(K - F, 0.0);
    double d1 = (std::log(F / K) + 0.5 * sd * sd) / sd;
    double d2 = d1 - sd;
    return D * (K * normal_cdf(-d2) - F * normal_cdf(-d1));
}

double bs_call(double F, double K, double T, double sigma, double D) {
    double sd = sigma * std::sqrt(T);
    if (sd <= 0) return D * std::max(F - K, 0.0);
    double d1 = (std::log(F / K) + 0.5 * sd * sd) / sd;
    double d2 = d1 - sd;
    return D * (F * normal_cdf(d1) - K * normal_cdf(d2));
}

double put_from_call(double call, double F, double K, double D) { return call - D * (F - K); }

double call_from_put(double put, double F, double K, double D) { return put + D * (F - K); }

std::optional<double> implied_vol_put(double price, double F, double K, double T, double D,
                                      const ImpliedVolOptions& opt) {
    double lo = opt.lo, hi = opt.hi;
    double plo = bs_put(F, K, T, lo, D), phi = bs_put(F, K, T, hi, D);
    if (!(price >= plo && price <= phi)) return std::nullopt;
    for (int it = 0; it < opt.max_iter; ++it) {
        double mid = 0.5 * (lo + hi);
        if (bs_put(F, K, T, mid, D) > price)
            hi = mid;
        else
            lo = mid;
        if (hi - lo < opt.tol) return 0.5 * (lo + hi);
    }
    return std::nullopt;
}

}  // namespace qb
