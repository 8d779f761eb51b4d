#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "qbound/error.hpp"
#include "qbound/models.hpp"
#include "qbound/numerics.hpp"
#include "qbound/simulate.hpp"

using namespace qb;

TEST_CASE("pareto support and calibration") {
    Pareto p;
    CHECK(model_cdf(p, Measure::Physical, p.B) == 0.0);
    CHECK_THROWS_AS(model_cdf(p, Measure::Physical, 0.5 * p.B), Error);
    auto c = Pareto::calibrate(0.33, 0.08, 1.0);
    CHECK(pareto_equity_premium(c) == doctest::Approx(0.08).epsilon(1e-12));
    CHECK(c.rf() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(c.A * c.B == doctest::Approx(c.alpha - c.beta + 1));
    auto w = Pareto::with_beta(c.A, c.alpha, 0.45);
    CHECK(w.A * w.B == doctest::Approx(w.alpha - w.beta + 1));
    CHECK_NOTHROW(pareto_sharpe(w));
    CHECK_THROWS_AS(pareto_sharpe(Pareto::with_beta(c.A, c.alpha, 0.55)), Error);
}

TEST_CASE("pareto risk-neutral cdf from the change of measure") {
    Pareto p = Pareto::calibrate(0.33, 0.08, 1.0);
    Rng rng(1);
    const int n = 400000;
    for (double x : {0.8, 1.0, 1.3}) {
        double acc = 0;
        Rng r2(2);
        for (int i = 0; i < n; ++i) {
            double u = r2.uniform();
            if (p.B * std::pow(u, -p.beta) <= x) acc += p.A * std::pow(u, p.alpha);
        }
        CHECK(p.rf() * acc / n == doctest::Approx(model_cdf(p, Measure::RiskNeutral, x)).epsilon(0.01));
    }
    (void)rng;
}

TEST_CASE("pareto sharpe ratio by simulation") {
    Pareto p = Pareto::calibrate(0.2, 0.08, 1.0);
    Rng rng(4);
    std::vector<double> r(1000000);
    for (auto& v : r) v = p.B * std::pow(rng.uniform(), -p.beta);
    double m = mean(r), s = sample_sd(r);
    double se = s / std::sqrt(static_cast<double>(r.size()));
    CHECK(std::abs((m - p.rf()) - pareto_sharpe(p) * s) < 3 * se + 1e-3 * s);
}

TEST_CASE("disaster without jumps is normal in consumption growth") {
    Disaster d;
    d.kappa = 0;
    for (double x : {-0.02, 0.0, 0.03, 0.05})
        CHECK(disaster_dc_cdf(d, x, false) == doctest::Approx(normal_cdf((x - d.mu) / d.sigma)).epsilon(1e-12));
}

TEST_CASE("disaster series truncation") {
    Disaster d;
    d.kappa = 2.0;
    Disaster more = d;
    more.j_max = 60;
    for (double x : {-1.0, -0.3, 0.0})
        CHECK(std::abs(disaster_dc_cdf(d, x, false) - disaster_dc_cdf(more, x, false)) < 1e-12);
}

TEST_CASE("disaster risk-neutral cdf against an importance-sampling oracle") {
    Disaster d;
    d.tilt_diffusion = true;  // exact Esscher tilt so the weighted draws target the same law
    Rng rng(7);
    const int n = 1000000;
    std::vector<std::pair<double, double>> draws(n);
    double wsum = 0;
    for (auto& [dc, w] : draws) {
        dc = d.mu + d.sigma * rng.normal();
        int j = rng.poisson(d.kappa);
        if (j > 0) dc += j * d.theta + std::sqrt(double(j)) * d.nu * rng.normal();
        w = std::exp(-d.gamma * dc);
        wsum += w;
    }
    std::sort(draws.begin(), draws.end());
    double acc = 0, worst = 0;
    std::size_t k = 0;
    for (double x = -1.2; x <= 0.15; x += 0.005) {
        while (k < draws.size() && draws[k].first <= x) acc += draws[k++].second;
        worst = std::max(worst, std::abs(acc / wsum - disaster_dc_cdf(d, x, true)));
    }
    CHECK(worst <= 0.003);
}

TEST_CASE("hoeffding identity") {
    auto m = JointNormal::priced(0.16, 1.0, 0.4, -0.8);
    auto h = hoeffding_check(m, m.mu_R - m.sigma_R, 1000000, 3);
    CHECK(std::abs(h.lhs - h.rhs) <= 3 * h.lhs_se);
    auto z = JointNormal::priced(0.16, 1.0, 0.4, 0.0);
    auto h0 = hoeffding_check(z, z.mu_R, 200000, 4);
    CHECK(std::abs(h0.lhs) < 4 * h0.lhs_se);
    CHECK(std::abs(h0.rhs) < 0.002);
}

TEST_CASE("joint-normal efficiency floor") {
    auto m = JointNormal::priced(0.16, 1.01, 0.4, -0.5);
    auto b = model_local_and_hj(m, linspace(0.01, 0.99, 99));
    for (double v : b.local.values) CHECK(b.hj / v >= std::sqrt(2 * M_PI) / 2 - 1e-9);
}

TEST_CASE("lognormal efficiency") {
    Lognormal m = Lognormal::priced(0.92, 0.0, 0.4, -0.5, 1.0);
    CHECK(lognormal_efficiency(m) == doctest::Approx(1.0).epsilon(0.01));
    Lognormal small = Lognormal::priced(1e-4, 0.0, 0.4, -0.5, 1e-4);
    CHECK(lognormal_efficiency(small) == doctest::Approx(std::sqrt(2 * M_PI) / 2).epsilon(1e-6));
    Lognormal mid = Lognormal::priced(0.16, 0.02, 0.4, -0.5, 1.0);
    CHECK(lognormal_efficiency(mid) > 1);
    CHECK(lognormal_efficiency_scan(mid, linspace(0.001, 0.999, 999)) ==
          doctest::Approx(lognormal_efficiency(mid)).epsilon(0.05));
}

TEST_CASE("lognormal physical quantile is a scaled risk-neutral quantile") {
    Lognormal m = Lognormal::priced(0.2, 0.02, 0.4, -0.5, 1.0);
    for (double t : {0.05, 0.5, 0.9})
        CHECK(model_quantile(m, Measure::Physical, t) ==
              doctest::Approx(std::exp((m.mu_R - m.r_f) * m.lambda) * model_quantile(m, Measure::RiskNeutral, t)).epsilon(1e-12));
}

TEST_CASE("crra tilt") {
    BsPeriod p{0.02, 0.2, 0.02, 1.0};
    auto base = bs_period_distribution(p, {0.2, 3.0, 4001});
    for (double x : {0.8, 1.0, 1.2}) CHECK(physical_cdf_crra(base, 0, x) == base.cdf_at(x));
    // gamma = 1: the Esscher tilt shifts the log mean by sigma^2.
    double m = (0.02 - 0.02) * 1.0, s = 0.2;
    for (double x : {0.8, 1.0, 1.2})
        CHECK(physical_cdf_crra(base, 1, x) == doctest::Approx(normal_cdf((std::log(x) - m - s * s) / s)).epsilon(1e-4));
    for (double x : {0.7, 0.9, 1.1}) {
        double prev = 2;
        for (double g : {0.0, 0.5, 1.0, 2.0, 5.0}) {
            double v = physical_cdf_crra(base, g, x);
            CHECK(v <= prev + 1e-12);
            prev = v;
        }
    }
}

TEST_CASE("exponential-utility premium increases with risk aversion") {
    BsPeriod p{0.02, 0.2, 0.02, 1.0};
    auto base = bs_period_distribution(p, {0.2, 3.0, 4001});
    double prev = -1;
    for (double g : {0.5, 1.0, 2.0, 4.0}) {
        auto b = model_local_and_hj(RepAgent{Utility{UtilityKind::Exponential, g}, base}, {0.05});
        CHECK(b.equity_premium >= prev);
        prev = b.equity_premium;
    }
}

TEST_CASE("hj bound binds for a linear sdf") {
    // M = a - bR prices R and the risk-free asset; its volatility meets the HJ bound.
    Rng rng(12);
    const double mu = 1.06, sd = 0.18, rf = 1.01;
    double b = (mu - rf) / (rf * sd * sd), a = 1 / rf + b * mu;
    std::vector<double> M, R;
    for (int i = 0; i < 400000; ++i) {
        double r = mu + sd * rng.normal();
        R.push_back(r);
        M.push_back(a - b * r);
    }
    CHECK(sample_sd(M) == doctest::Approx(hj_bound(mu, sd, rf)).epsilon(0.01));
}
