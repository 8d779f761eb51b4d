#include <doctest.h>

#include <cmath>

#include "qbound/error.hpp"
#include "qbound/numerics.hpp"
#include "qbound/qr.hpp"

using namespace qb;

namespace {

QRDesign random_design(Rng& rng, int n, int k, double tau) {
    QRDesign d;
    d.tau = tau;
    d.y.resize(n);
    d.X.resize(n, k);
    for (int i = 0; i < n; ++i) {
        double e = rng.normal();
        d.y(i) = 0.5 + e;
        for (int j = 0; j < k; ++j) {
            d.X(i, j) = rng.normal();
            d.y(i) += (j + 1) * d.X(i, j);
        }
    }
    return d;
}

}  // namespace

TEST_CASE("intercept-only fit is the sample quantile") {
    Rng rng(1);
    QRDesign d;
    d.tau = 0.3;
    d.y.resize(101);
    d.X.resize(101, 0);
    std::vector<double> v;
    for (int i = 0; i < 101; ++i) v.push_back(d.y(i) = rng.normal());
    auto f = qr_fit(d);
    CHECK(qr_loss(d, f.beta) <= qr_loss(d, Eigen::VectorXd::Constant(1, empirical_quantile(v, 0.3))) + 1e-10);
}

TEST_CASE("interior point matches the exhaustive vertex search") {
    Rng rng(2);
    for (int rep = 0; rep < 40; ++rep) {
        auto d = random_design(rng, 25, 2, 0.1 + 0.8 * rng.uniform());
        auto a = qr_fit(d), b = qr_fit_exhaustive(d);
        CHECK(a.loss == doctest::Approx(b.loss).epsilon(1e-9));
    }
}

TEST_CASE("large design recovers coefficients") {
    Rng rng(3);
    auto d = random_design(rng, 3000, 2, 0.5);
    auto f = qr_fit(d);
    CHECK(f.beta(0) == doctest::Approx(0.5).epsilon(0.1));
    CHECK(f.beta(1) == doctest::Approx(1.0).epsilon(0.05));
    CHECK(f.beta(2) == doctest::Approx(2.0).epsilon(0.05));
    CHECK(f.r1 > 0);
}

TEST_CASE("collinear design is rejected") {
    QRDesign d;
    d.tau = 0.5;
    d.y = Eigen::VectorXd::LinSpaced(50, 0, 1);
    d.X.resize(50, 2);
    d.X.col(0) = Eigen::VectorXd::LinSpaced(50, 1, 2);
    d.X.col(1) = 2 * d.X.col(0);
    CHECK_THROWS_AS(qr_fit(d), Error);
}

TEST_CASE("hit statistic and out-of-sample fit") {
    std::vector<double> r = {1, 2, 3, 4}, q = {1.5, 1.5, 1.5, 1.5};
    CHECK(hit_statistic(r, q, 0.25) == doctest::Approx(0.0));
    CHECK_THROWS_AS(hit_statistic(r, {1.0}, 0.25), Error);

    Rng rng(4);
    std::vector<double> y, f;
    for (int t = 0; t < 300; ++t) {
        double s = 0.5 + rng.uniform();
        y.push_back(s * rng.normal());
        f.push_back(s * normal_quantile(0.1));
    }
    CHECK(r1_oos(y, f, 50, 0.1) > 0);
    CHECK_THROWS_AS(r1_oos(y, f, 300, 0.1), Error);
    CHECK_THROWS_AS(r1_oos(y, f, 10, 0.1), Error);
}

TEST_CASE("wald test") {
    QRFit f;
    f.beta = Eigen::Vector2d(0, 1);
    f.cov_boot = Eigen::Matrix2d::Identity() * 0.01;
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(2, 2);
    Eigen::VectorXd b = Eigen::Vector2d(0, 1);
    CHECK(wald_test(f, A, b) == doctest::Approx(1.0));
    f.beta = Eigen::Vector2d(0.196, 1);
    CHECK(wald_test(f, A, b) == doctest::Approx(chi2_sf(0.196 * 0.196 / 0.01, 2)).epsilon(1e-9));
    f.cov_boot = Eigen::Matrix2d::Zero();
    CHECK_THROWS_AS(wald_test(f, A, b), Error);
}

TEST_CASE("expanding forecasts") {
    Rng rng(5);
    auto d = random_design(rng, 160, 1, 0.5);
    auto fc = expanding_forecast(d.y, d.X, 100, 0.5, 10);
    REQUIRE(fc.size() == 160);
    CHECK(std::isnan(fc[99]));
    CHECK(std::isfinite(fc[100]));
    CHECK_THROWS_AS(expanding_forecast(d.y, d.X, 160, 0.5), Error);
}

TEST_CASE("crossing rate") {
    CHECK(crossing_rate({{1, 2, 3}, {2, 3, 4}}) == doctest::Approx(0.0));
    CHECK(crossing_rate({{1, 2}, {0, 3}}) == doctest::Approx(0.5));
}
