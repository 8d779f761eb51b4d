#include <doctest.h>

#include <cmath>

#include "qbound/bootstrap.hpp"
#include "qbound/numerics.hpp"

using namespace qb;

TEST_CASE("full-length moving block is a cyclic shift") {
    ResamplePlan p;
    p.scheme = Scheme::MovingBlock;
    p.block_length = 50;
    auto idx = resample_indices(p, 50, 3);
    for (std::size_t i = 1; i < idx.size(); ++i) CHECK(idx[i] == (idx[i - 1] + 1) % 50);
}

TEST_CASE("index streams are reproducible") {
    ResamplePlan p;
    p.scheme = Scheme::Stationary;
    p.block_length = 7;
    p.seed = 99;
    CHECK(resample_indices(p, 200, 4) == resample_indices(p, 200, 4));
    CHECK(resample_indices(p, 200, 4) != resample_indices(p, 200, 5));
}

TEST_CASE("stationary bootstrap marginal is uniform") {
    ResamplePlan p;
    p.scheme = Scheme::Stationary;
    p.block_length = 5;
    p.seed = 1;
    const std::size_t n = 20;
    std::vector<double> count(n, 0);
    std::size_t total = 0;
    for (int r = 0; total < 100000; ++r)
        for (auto i : resample_indices(p, n, r)) {
            count[i]++;
            total++;
        }
    double e = static_cast<double>(total) / n, x2 = 0;
    for (double c : count) x2 += (c - e) * (c - e) / e;
    CHECK(chi2_sf(x2, n - 1) > 0.001);
}

TEST_CASE("block bootstrap standard error of an AR(1) mean") {
    Rng rng(11);
    const int n = 2000;
    const double phi = 0.8;
    std::vector<double> x(n);
    double v = 0;
    for (int t = 0; t < n; ++t) x[t] = v = phi * v + rng.normal();
    double analytic = std::sqrt(1.0 / ((1 - phi) * (1 - phi)) / n);
    ResamplePlan p;
    p.scheme = Scheme::MovingBlock;
    p.block_length = 50;
    p.seed = 5;
    std::vector<double> means;
    for (int r = 0; r < 500; ++r) {
        double s = 0;
        for (auto i : resample_indices(p, n, r)) s += x[i];
        means.push_back(s / n);
    }
    double se = sample_sd(means);
    CHECK(std::abs(se / analytic - 1) < 0.2);
}

TEST_CASE("taper weights average one") {
    ResamplePlan p;
    p.block_length = 10;
    p.taper = 0.5;
    auto w = resample_weights(p, 100, 0);
    CHECK(mean(w) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("bootstrap covariance is independent of worker count") {
    Rng rng(6);
    QRDesign d;
    d.tau = 0.5;
    d.y.resize(300);
    d.X.resize(300, 1);
    for (int i = 0; i < 300; ++i) {
        d.X(i, 0) = rng.normal();
        d.y(i) = 1 + d.X(i, 0) + rng.normal();
    }
    ResamplePlan p;
    p.block_length = 5;
    p.n_replicates = 60;
    p.seed = 8;
    auto a = qr_boot_cov(d, p, 1), b = qr_boot_cov(d, p, 4);
    CHECK((a.cov - b.cov).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.n_failed == 0);

    QRDesign exact = d;
    exact.y = Eigen::VectorXd::Ones(300) + d.X.col(0);
    auto z = qr_boot_cov(exact, p, 2);
    CHECK(z.cov.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("iid bootstrap covariance against the sandwich formula") {
    Rng rng(21);
    const int n = 2000;
    QRDesign d;
    d.tau = 0.5;
    d.y.resize(n);
    d.X.resize(n, 1);
    for (int i = 0; i < n; ++i) {
        d.X(i, 0) = rng.normal();
        d.y(i) = d.X(i, 0) + rng.normal();
    }
    // Homoskedastic normal errors: var = tau(1-tau) / f(0)^2 (X'X)^-1.
    double f0 = normal_pdf(0);
    Eigen::MatrixXd Z = d.full();
    Eigen::MatrixXd V = 0.25 / (f0 * f0) * (Z.transpose() * Z).inverse();
    ResamplePlan p;
    p.scheme = Scheme::Iid;
    p.n_replicates = 300;
    p.seed = 2;
    auto bc = qr_boot_cov(d, p, 4);
    for (int j = 0; j < 2; ++j) CHECK(std::abs(std::sqrt(bc.cov(j, j) / V(j, j)) - 1) < 0.25);
}
