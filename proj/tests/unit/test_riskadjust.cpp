#include <doctest.h>

#include <cmath>

#include "qbound/error.hpp"
#include "qbound/models.hpp"
#include "qbound/numerics.hpp"
#include "qbound/riskadjust.hpp"
#include "qbound/simulate.hpp"

using namespace qb;

namespace {

DistributionEstimate bs_rn(double sigma, double r, double T) {
    BsPeriod p{r, sigma, r, T};
    return bs_period_distribution(p, {0.2, 3.0, 4001}, static_cast<int>(T * 365));
}

DistributionEstimate point_mass(double at) {
    DistributionEstimate d;
    d.grid = linspace(at, at + 1e-9, 3);
    d.cdf = {1, 1, 1};
    d.pdf = {0, 0, 0};
    d.rf_gross = at;
    return d;
}

}  // namespace

TEST_CASE("zero lower bound gives zero adjustment") {
    auto d = bs_rn(0.2, 0.02, 30 / 365.0);
    CHECK(gateaux_ra(0.0, d, 0.05) == 0.0);
    CHECK(quantile_predictor(0.9, 0.0) == 0.9);
    CHECK_THROWS_AS(gateaux_ra(0.01, d, 0.0005), Error);
}

TEST_CASE("degenerate distribution at the risk-free rate") {
    auto d = point_mass(1.01);
    CHECK(feasible_lb(d, 1.01, 0.2) == doctest::Approx(0.0));
    CHECK(crash_prob_log_utility(d, 1.01, 0.3) == doctest::Approx(0.3));
}

TEST_CASE("reciprocal density by central difference") {
    double T = 30 / 365.0, s = 0.2 * std::sqrt(T), m = (0.02 - 0.02) * T;
    auto d = bs_rn(0.2, 0.02, T);
    double q = std::exp(m + s * normal_quantile(0.05));
    double f = normal_pdf((std::log(q) - m) / s) / (q * s);
    CHECK(gateaux_ra(1.0, d, 0.05, 0.001) == doctest::Approx(1 / f).epsilon(0.005));
}

TEST_CASE("grid moments agree with closed-form lognormal moments") {
    double T = 30 / 365.0, s = 0.2 * std::sqrt(T), m = (0.02 - 0.02) * T, rf = std::exp(0.02 * T);
    auto d = bs_rn(0.2, 0.02, T);
    auto a = rn_moment_set(d, rf, 0.05);
    auto b = lognormal_moment_set(m, s, rf, 0.05);
    for (int k = 0; k < 3; ++k) {
        CHECK(a.full[k] == doctest::Approx(b.full[k]).epsilon(1e-4).scale(1e-9));
        CHECK(a.trunc[k] == doctest::Approx(b.trunc[k]).epsilon(1e-3).scale(1e-9));
    }
}

TEST_CASE("risk-neutral measure as the truth gives a near-zero bound") {
    auto d = bs_rn(0.15, 0.02, 30 / 365.0);
    for (double t : {0.05, 0.1, 0.2}) CHECK(std::abs(feasible_lb(d, d.rf_gross, t)) < 0.02);
}

TEST_CASE("lower bound is exact under log utility with model coefficients") {
    // zeta is linear for log utility, so the third-order expansion has no remainder.
    auto d = bs_rn(0.2, 0.02, 1.0);
    Utility u{UtilityKind::Log, 1};
    auto phys = physical_from_utility(d, u);
    auto th = UtilityCoeffs::from_utility(u, d.rf_gross);
    for (double t : {0.01, 0.05, 0.1, 0.2, 0.3}) {
        double gap = t - phys.cdf_at(d.quantile(t));
        CHECK(feasible_lb(d, d.rf_gross, t, th) == doctest::Approx(gap).epsilon(1e-3));
    }
}

TEST_CASE("covariance identity for the log-utility gap") {
    auto d = bs_rn(0.2, 0.02, 1.0);
    double rf = d.rf_gross;
    auto phys = physical_from_utility(d, Utility{UtilityKind::Log, 1});
    double t = 0.1, q = d.quantile(t);
    double ez = partial_expectation(d, [&](double x) { return x / rf; });
    double ezi = partial_expectation(d, [&](double x) { return x / rf; }, t);
    double cov = ezi - t * ez;
    CHECK(t - phys.cdf_at(q) == doctest::Approx(-cov / ez).epsilon(1e-4));
}

TEST_CASE("validity threshold") {
    auto d = bs_rn(0.2, 0.02, 1.0);
    CHECK(validity_tau_star(Utility{UtilityKind::Log, 1}, d).tau_star == 1.0);
    CHECK(validity_tau_star(Utility{UtilityKind::Crra, 2}, d).tau_star == 1.0);
    CHECK_THROWS_AS(validity_tau_star(Utility{UtilityKind::Exponential, 2}, d), Error);

    for (double g : {0.5, 2.5}) {
        Utility u{UtilityKind::Crra, g};
        double ts = validity_tau_star(u, d).tau_star;
        CHECK(ts > 0);
        CHECK(ts < 0.5);
        // Dense scan locates the same sign change.
        double prev = validity_gamma_prime(u, d, 0.002), found = -1;
        for (double t = 0.004; t <= 0.5; t += 0.002) {
            double v = validity_gamma_prime(u, d, t);
            if ((v < 0) != (prev < 0)) {
                found = t;
                break;
            }
            prev = v;
        }
        CHECK(std::abs(found - ts) <= 0.0021);
    }
}

TEST_CASE("log-utility crash probability") {
    auto d = bs_rn(0.2, 0.02, 30 / 365.0);
    CHECK(crash_prob_log_utility(d, d.rf_gross, 0.999) == doctest::Approx(1.0).epsilon(2e-3));
    auto phys = physical_from_utility(d, Utility{UtilityKind::Log, 1});
    double t = 0.05;
    CHECK(crash_prob_log_utility(d, d.rf_gross, t) == doctest::Approx(phys.cdf_at(d.quantile(t))).epsilon(1e-3));
}

TEST_CASE("risk adjustment record") {
    auto d = bs_rn(0.2, 0.02, 30 / 365.0);
    auto r = risk_adjustment(d, 0.05);
    CHECK(r.pdf_at_q > 0);
    CHECK(r.ra == doctest::Approx(r.lb / r.pdf_at_q).epsilon(1e-9));
    CHECK(r.q_hat >= r.q_tilde - 1e-12 * (r.lb < 0));
    std::vector<RiskAdjustment> rows;
    for (double t : {0.05, 0.1, 0.2}) rows.push_back(risk_adjustment(d, t));
    CHECK(predictor_crossing_rate(rows) == 0.0);
}
