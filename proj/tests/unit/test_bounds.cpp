#include <doctest.h>

#include <cmath>

#include "qbound/bounds.hpp"
#include "qbound/error.hpp"
#include "qbound/models.hpp"
#include "qbound/numerics.hpp"

using namespace qb;

namespace {

QuantileCurve curve_of(const DistributionEstimate& d, const std::vector<double>& taus) { return rn_quantile_curve(d, taus); }

}  // namespace

TEST_CASE("odc is the identity when the measures coincide") {
    auto d = lognormal_distribution(0.0, 0.1, {}, Measure::RiskNeutral, 30, 1.0);
    auto p = d;
    p.measure = Measure::Physical;
    auto taus = linspace(0.01, 0.99, 99);
    auto o = odc(p, curve_of(d, taus));
    for (std::size_t i = 0; i < taus.size(); ++i) CHECK(o.phi[i] == doctest::Approx(taus[i]).epsilon(1e-6));
    auto lb = local_bound(o, 1.0);
    for (double v : lb.values) CHECK(v < 1e-5);
}

TEST_CASE("pareto odc has the closed form") {
    Pareto m;
    auto taus = linspace(0.01, 0.99, 99);
    auto phys = distribution_from_functions([&](double x) { return x < m.B ? 0.0 : model_cdf(m, Measure::Physical, x); },
                                            [](double) { return 0.0; }, {0.5, 200.0, 200001}, Measure::Physical, 0, m.rf());
    QuantileCurve q;
    q.taus = taus;
    for (double t : taus) q.values.push_back(model_quantile(m, Measure::RiskNeutral, t));
    auto o = odc(phys, q);
    for (std::size_t i = 0; i < taus.size(); ++i)
        CHECK(std::abs(o.phi[i] - (1 - std::pow(1 - taus[i], 1 / (m.alpha + 1)))) < 1e-3);
}

TEST_CASE("odc is ordinal") {
    auto d = lognormal_distribution(0.0, 0.1, {}, Measure::RiskNeutral, 30, 1.0);
    auto p = lognormal_distribution(0.01, 0.1, {}, Measure::Physical, 30, 1.0);
    auto taus = linspace(0.05, 0.95, 19);
    auto o1 = odc(p, curve_of(d, taus));
    // Re-express both in log units.
    auto dl = distribution_from_functions([&](double y) { return d.cdf_at(std::exp(y)); }, [](double) { return 0.0; },
                                          {-1.2, 0.69, 20001}, Measure::RiskNeutral, 30, 1.0);
    auto pl = distribution_from_functions([&](double y) { return p.cdf_at(std::exp(y)); }, [](double) { return 0.0; },
                                          {-1.2, 0.69, 20001}, Measure::Physical, 30, 1.0);
    auto o2 = odc(pl, curve_of(dl, taus));
    for (std::size_t i = 0; i < taus.size(); ++i) CHECK(o1.phi[i] == doctest::Approx(o2.phi[i]).epsilon(1e-3));
}

TEST_CASE("odc rejects mismatched horizons") {
    auto d = lognormal_distribution(0.0, 0.1, {}, Measure::RiskNeutral, 30, 1.0);
    auto p = lognormal_distribution(0.0, 0.1, {}, Measure::Physical, 60, 1.0);
    CHECK_THROWS_AS(odc(p, curve_of(d, {0.5})), Error);
}

TEST_CASE("hj bound") {
    CHECK(hj_bound(1.0, 0.1, 1.0) == doctest::Approx(0.0));
    CHECK(hj_bound(1.08, 0.2, 1.0) == doctest::Approx(0.4));
    CHECK_THROWS_AS(hj_bound(1.0, 0.0, 1.0), Error);
}

TEST_CASE("kernel cdf") {
    Rng rng(3);
    std::vector<double> x(5000);
    for (auto& v : x) v = rng.normal();
    auto k = kernel_cdf(x);
    double worst = 0;
    for (double z = -3; z <= 3; z += 0.01) worst = std::max(worst, std::abs(k.dist.cdf_at(z) - normal_cdf(z)));
    CHECK(worst <= 0.02);
    CHECK(k.bandwidth > 0);

    std::vector<double> small(50);
    for (auto& v : small) v = rng.normal();
    auto tiny = kernel_cdf(small, 1e-9);
    std::vector<double> sorted = small;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i)
        CHECK(kernel_cdf_at(small, 1e-9, sorted[i]) == doctest::Approx((i + 0.5) / 50.0).epsilon(1e-9));
    (void)tiny;

    std::vector<double> same(40, 1.02);
    auto s = kernel_cdf(same);
    double h = s.bandwidth;
    CHECK(s.dist.cdf_at(1.02) == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(s.dist.cdf_at(1.02 + 0.5 * h) == doctest::Approx(epanechnikov_cdf(0.5)).epsilon(1e-3));

    CHECK_THROWS_AS(kernel_cdf(std::vector<double>(10, 1.0)), Error);
}

TEST_CASE("alternative bounds") {
    ODC o;
    o.taus = {0.1, 0.2};
    o.phi = {0.1, 0.2};
    QuantileCurve q;
    q.taus = o.taus;
    q.values = {0.9, 0.95};
    auto snow = alt_bounds(o, q, 1.0, BoundKind::Snow, 2.0);
    CHECK(snow.values[0] == doctest::Approx(0.1 / std::sqrt(0.1)));
    auto le = alt_bounds(o, q, 1.0, BoundKind::LogEntropy, 0);
    CHECK(le.values[0] == doctest::Approx(0.0));
    auto liu = alt_bounds(o, q, 1.0, BoundKind::Liu, -1.0);
    CHECK(liu.values[1] == doctest::Approx(0.2));
    CHECK_THROWS_AS(alt_bounds(o, q, 1.0, BoundKind::Snow, 1.0), Error);
    CHECK_THROWS_AS(alt_bounds(o, q, 1.0, BoundKind::Liu, 0.5), Error);

    o.phi[0] = 0;
    auto trimmed = alt_bounds(o, q, 1.0, BoundKind::LogEntropy, 0);
    CHECK(trimmed.taus.size() == 1);
}

TEST_CASE("liu bound holds for the pareto model") {
    Pareto m;
    // E(M^-1) = A^-1 / (1 - alpha) for U uniform.
    double lhs = 1.0 / (m.A * (1 - m.alpha));
    for (double t : {0.05, 0.2, 0.5}) {
        double phi = 1 - std::pow(1 - t, 1 / (m.alpha + 1));
        double rhs = std::pow(t / m.rf(), -1.0) * std::pow(phi, 2.0);
        CHECK(lhs >= rhs);
    }
}

TEST_CASE("dominance test in a risk-neutral world") {
    Rng rng(9);
    std::vector<double> r;
    std::vector<DistributionEstimate> d;
    auto law = lognormal_distribution(-0.5 * 0.05 * 0.05, 0.05, {0.5, 1.6, 1001}, Measure::RiskNeutral, 30, 1.0);
    for (int t = 0; t < 200; ++t) {
        r.push_back(std::exp(-0.5 * 0.05 * 0.05 + 0.05 * rng.normal()));
        d.push_back(law);
    }
    DominanceOptions opt;
    opt.n_boot = 200;
    opt.seed = 1;
    opt.jobs = 4;
    auto res = dominance_test(r, d, 0.046, 1.0, opt);
    CHECK(res.p_value > 0.05);
    opt.jobs = 1;
    auto again = dominance_test(r, d, 0.046, 1.0, opt);
    CHECK(again.p_value == res.p_value);
    opt.n_boot = 50;
    CHECK_THROWS_AS(dominance_test(r, d, 0.046, 1.0, opt), Error);
    opt.n_boot = 200;
    CHECK_THROWS_AS(dominance_test(r, d, 0.001, 1.0, opt), Error);
}
