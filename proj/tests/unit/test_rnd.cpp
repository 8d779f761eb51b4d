#include <doctest.h>

#include <cmath>

#include "qbound/black_scholes.hpp"
#include "qbound/error.hpp"
#include "qbound/numerics.hpp"
#include "qbound/rnd.hpp"
#include "qbound/simulate.hpp"

using namespace qb;

namespace {

double ln_cdf(double x, double m, double s) { return normal_cdf((std::log(x) - m) / s); }

}  // namespace

TEST_CASE("Breeden-Litzenberger on an exact Black-Scholes chain") {
    BsPeriod law{0.05, 0.2, 0.02, 30 / 365.0};
    auto chain = synthetic_chain(law, Date::parse("2020-01-02"), 30, 120, 0.4, 1.8);
    auto d = fit_rn_distribution(chain);
    CHECK(d.invariant_violations().empty());
    double T = 30 / 365.0, m = (0.02 - 0.02) * T, s = 0.2 * std::sqrt(T);
    double worst = 0;
    for (double x = 0.8; x <= 1.2; x += 0.001) worst = std::max(worst, std::abs(d.cdf_at(x) - ln_cdf(x, m, s)));
    CHECK(worst < 0.005);
    double mean = partial_expectation(d, [](double x) { return x; });
    CHECK(std::abs(mean - d.rf_gross) / d.rf_gross < 0.005);
}

TEST_CASE("too few strikes") {
    BsPeriod law{0.05, 0.2, 0.02, 30 / 365.0};
    auto chain = synthetic_chain(law, Date::parse("2020-01-02"), 30, 6, 0.6, 1.2);
    CHECK_THROWS_AS(fit_rn_distribution(chain), Error);
    auto narrow = synthetic_chain(law, Date::parse("2020-01-02"), 30, 20, 0.9, 1.2);
    CHECK_THROWS_AS(fit_rn_distribution(narrow), Error);
}

TEST_CASE("quantile is the generalised inverse of the cdf") {
    auto d = lognormal_distribution(0.0, 0.1, {}, Measure::RiskNeutral, 30, 1.0);
    for (double t : {0.01, 0.05, 0.5, 0.9}) {
        double q = d.quantile(t);
        CHECK(d.cdf_at(q) == doctest::Approx(t).epsilon(1e-6));
        CHECK(q == doctest::Approx(std::exp(0.1 * normal_quantile(t))).epsilon(1e-4));
    }
    auto wide = lognormal_distribution(0.0, 0.5, {0.2, 3.0, 2001}, Measure::RiskNeutral, 30, 1.0);
    bool truncated = false;
    CHECK(wide.quantile(1e-4, &truncated) == doctest::Approx(0.2));
    CHECK(truncated);
}

TEST_CASE("partial expectations of a lognormal") {
    double m = 0.01, s = 0.15;
    auto d = lognormal_distribution(m, s, {0.2, 3.0, 4001}, Measure::RiskNeutral, 30, 1.0);
    CHECK(partial_expectation(d, [](double x) { return x; }) == doctest::Approx(std::exp(m + s * s / 2)).epsilon(1e-6));
    double tau = 0.1, lq = m + s * normal_quantile(tau);
    double expect = std::exp(m + s * s / 2) * normal_cdf((lq - m - s * s) / s);
    CHECK(partial_expectation(d, [](double x) { return x; }, tau) == doctest::Approx(expect).epsilon(1e-5));
    CHECK(rn_moment(d, 2, 1.0) > 0);
    CHECK_THROWS_AS(rn_moment(d, 5, 1.0), Error);
}

TEST_CASE("maturity interpolation") {
    BsPeriod law{0.05, 0.25, 0.02, 1};
    auto a = fit_rn_distribution(synthetic_chain(law, Date::parse("2020-01-02"), 85, 100, 0.3, 1.9));
    auto b = fit_rn_distribution(synthetic_chain(law, Date::parse("2020-01-02"), 97, 100, 0.3, 1.9));
    auto at_a = interpolate_maturity(a, b, 85);
    for (std::size_t i = 0; i < a.cdf.size(); i += 97) CHECK(at_a.cdf[i] == doctest::Approx(a.cdf[i]).epsilon(1e-9));
    auto mid = interpolate_maturity(a, b, 90);
    double T = 90 / 365.0, s = 0.25 * std::sqrt(T), m = 0.02 * T - 0.5 * s * s;
    for (double x = 0.8; x <= 1.2; x += 0.01) CHECK(std::abs(mid.cdf_at(x) - ln_cdf(x, m, s)) < 0.005);
    CHECK_THROWS_AS(interpolate_maturity(a, b, 120), Error);
}

TEST_CASE("unconditional cdf averages dates with a common horizon") {
    auto a = lognormal_distribution(0.0, 0.1, {}, Measure::RiskNeutral, 30, 1.0);
    auto b = lognormal_distribution(0.0, 0.2, {}, Measure::RiskNeutral, 30, 1.0);
    auto u = unconditional_rn_cdf({a, b});
    CHECK(u.cdf_at(0.9) == doctest::Approx(0.5 * (a.cdf_at(0.9) + b.cdf_at(0.9))).epsilon(1e-9));
    auto c = lognormal_distribution(0.0, 0.2, {}, Measure::RiskNeutral, 60, 1.0);
    CHECK_THROWS_AS(unconditional_rn_cdf({a, c}), Error);
}
