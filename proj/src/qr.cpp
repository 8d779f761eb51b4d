#include "qbound/qr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "qbound/error.hpp"
#include "qbound/numerics.hpp"

namespace qb {

using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd QRDesign::full() const {
    const Eigen::Index n = y.size();
    MatrixXd Z(n, p());
    if (include_intercept) Z.col(0).setOnes();
    if (X.cols() > 0) Z.rightCols(X.cols()) = X;
    return Z;
}

void QRDesign::validate() const {
    if (!(tau > 0 && tau < 1)) throw Error(Errc::InvalidArgument, "tau must lie in (0,1)");
    if (p() < 1) throw Error(Errc::InvalidArgument, "design has no columns");
    if (X.cols() > 0 && X.rows() != y.size()) throw Error(Errc::InvalidArgument, "X and y row counts differ");
    if (y.size() < p() + 1) throw Error(Errc::InvalidArgument, "need at least p+1 observations");
    if (!y.allFinite() || !X.allFinite()) throw Error(Errc::InvalidArgument, "non-finite design entries");
    if (weights.size() > 0) {
        if (weights.size() != y.size()) throw Error(Errc::InvalidArgument, "weights length differs from y");
        if (!(weights.array() > 0).all()) throw Error(Errc::InvalidArgument, "weights must be positive");
    }
}

namespace {

struct Weighted {
    VectorXd y;
    MatrixXd Z;
};

Weighted weighted_system(const QRDesign& d) {
    Weighted w{d.y, d.full()};
    if (d.weights.size() > 0) {
        w.y = w.y.cwiseProduct(d.weights);
        w.Z = d.weights.asDiagonal() * w.Z;
    }
    return w;
}

double loss_of(const VectorXd& y, const MatrixXd& Z, const VectorXd& beta, double tau) {
    VectorXd r = y - Z * beta;
    double s = 0;
    for (Eigen::Index i = 0; i < r.size(); ++i) s += pinball(r[i], tau);
    return s;
}

double weighted_quantile(const VectorXd& y, const VectorXd& w, double tau) {
    const Eigen::Index n = y.size();
    if (w.size() == 0) return empirical_quantile(std::vector<double>(y.data(), y.data() + n), tau);
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return y[a] < y[b]; });
    double total = w.sum(), acc = 0;
    for (auto i : idx) {
        acc += w[i];
        if (acc >= tau * total * (1 - 1e-14)) return y[i];
    }
    return y[idx.back()];
}

double r1_of(const QRDesign& d, double loss) {
    double q = weighted_quantile(d.y, d.weights, d.tau);
    double base = 0;
    for (Eigen::Index i = 0; i < d.y.size(); ++i) {
        double wi = d.weights.size() ? d.weights[i] : 1.0;
        base += wi * pinball(d.y[i] - q, d.tau);
    }
    if (base <= 0) return loss <= 0 ? 1.0 : -std::numeric_limits<double>::infinity();
    return 1.0 - loss / base;
}

void check_rank(const MatrixXd& Z) {
    Eigen::ColPivHouseholderQR<MatrixXd> qr(Z);
    qr.setThreshold(1e-10);
    if (qr.rank() < Z.cols()) throw Error(Errc::DegenerateDesign, "regressor matrix is rank deficient");
}

// Best interpolating fit over the given p-subsets of `cand`.
struct VertexSearch {
    const VectorXd& y;
    const MatrixXd& Z;
    double tau;
    bool found = false;
    double best_loss = std::numeric_limits<double>::infinity();
    VectorXd best;

    void consider(const std::vector<Eigen::Index>& rows) {
        const Eigen::Index p = Z.cols();
        MatrixXd A(p, p);
        VectorXd b(p);
        for (Eigen::Index k = 0; k < p; ++k) {
            A.row(k) = Z.row(rows[static_cast<std::size_t>(k)]);
            b[k] = y[rows[static_cast<std::size_t>(k)]];
        }
        Eigen::FullPivLU<MatrixXd> lu(A);
        lu.setThreshold(1e-12);
        if (!lu.isInvertible()) return;
        VectorXd beta = lu.solve(b);
        if (!beta.allFinite()) return;
        double l = loss_of(y, Z, beta, tau);
        double tol = 1e-12 * (1.0 + std::abs(best_loss));
        bool take = !found || l < best_loss - tol ||
                    (std::abs(l - best_loss) <= tol && beta.squaredNorm() < best.squaredNorm());
        if (take) {
            best = beta;
            best_loss = l;
            found = true;
        }
    }

    void enumerate(const std::vector<Eigen::Index>& cand) {
        const std::size_t p = static_cast<std::size_t>(Z.cols());
        const std::size_t m = cand.size();
        if (m < p) return;
        std::vector<std::size_t> c(p);
        std::iota(c.begin(), c.end(), 0);
        std::vector<Eigen::Index> rows(p);
        for (;;) {
            for (std::size_t k = 0; k < p; ++k) rows[k] = cand[c[k]];
            consider(rows);
            std::size_t k = p;
            while (k > 0 && c[k - 1] == m - p + (k - 1)) --k;
            if (k == 0) break;
            ++c[k - 1];
            for (std::size_t j = k; j < p; ++j) c[j] = c[j - 1] + 1;
        }
    }
};

// Primal-dual predictor-corrector on the bounded dual:
//   max y'a  s.t.  Z'a = (1 - tau) Z'1,  0 <= a <= 1.
// Coefficients are minus the equality multipliers.
bool interior_point(const VectorXd& yv, const MatrixXd& Z, double tau, const QROptions& opt, VectorXd& beta,
                    int& iters) {
    const Eigen::Index n = Z.rows(), p = Z.cols();
    // Scale for conditioning; undone at the end.
    double sy = yv.cwiseAbs().mean();
    if (!(sy > 0)) sy = 1.0;
    VectorXd sx(p);
    for (Eigen::Index j = 0; j < p; ++j) {
        double m = Z.col(j).cwiseAbs().maxCoeff();
        sx[j] = m > 0 ? m : 1.0;
    }
    MatrixXd A = (Z * sx.cwiseInverse().asDiagonal()).transpose();  // p x n
    VectorXd c = -yv / sy;
    VectorXd u = VectorXd::Ones(n);
    VectorXd x = VectorXd::Constant(n, 1.0 - tau);
    VectorXd s = u - x;
    VectorXd b = A * x;

    MatrixXd AAt = A * A.transpose();
    VectorXd dual = AAt.ldlt().solve(A * c);
    VectorXd r = c - A.transpose() * dual;
    double shift = 0.1 * r.cwiseAbs().mean() + 1e-8;
    VectorXd z = r.cwiseMax(0.0).array() + shift;
    VectorXd w = (-r).cwiseMax(0.0).array() + shift;

    const double eta = 0.99995;
    auto max_step = [](const VectorXd& v, const VectorXd& dv) {
        double a = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < v.size(); ++i)
            if (dv[i] < 0) a = std::min(a, -v[i] / dv[i]);
        return a;
    };

    for (iters = 0; iters < opt.max_iter; ++iters) {
        VectorXd rp = b - A * x;
        VectorXd v = c - A.transpose() * dual;  // rd + z - w
        VectorXd rd = v - z + w;
        double gap = z.dot(x) + w.dot(s);
        double obj = std::abs(c.dot(x)) + 1.0;
        if (gap <= opt.gap_tol * obj && rd.cwiseAbs().maxCoeff() <= 1e-9 * (1.0 + c.cwiseAbs().maxCoeff()) &&
            rp.cwiseAbs().maxCoeff() <= 1e-9 * (1.0 + b.cwiseAbs().maxCoeff()))
            break;

        VectorXd q = (z.cwiseQuotient(x) + w.cwiseQuotient(s)).cwiseInverse();
        MatrixXd AQA = A * q.asDiagonal() * A.transpose();
        Eigen::LDLT<MatrixXd> ldlt(AQA);
        if (ldlt.info() != Eigen::Success) return false;

        // Affine scaling direction.
        VectorXd dy = ldlt.solve(rp + A * q.cwiseProduct(v));
        VectorXd dx = q.cwiseProduct(A.transpose() * dy - v);
        VectorXd ds = -dx;
        VectorXd dz = -z - z.cwiseProduct(dx).cwiseQuotient(x);
        VectorXd dw = -w + w.cwiseProduct(dx).cwiseQuotient(s);
        double ap = std::min(1.0, eta * std::min(max_step(x, dx), max_step(s, ds)));
        double ad = std::min(1.0, eta * std::min(max_step(z, dz), max_step(w, dw)));

        if (std::min(ap, ad) < 1.0) {
            double g_aff = (x + ap * dx).dot(z + ad * dz) + (s + ap * ds).dot(w + ad * dw);
            double mu = gap * std::pow(g_aff / gap, 3) / (2.0 * static_cast<double>(n));
            VectorXd xi = mu * x.cwiseInverse() - mu * s.cwiseInverse() - dx.cwiseProduct(dz).cwiseQuotient(x) +
                          ds.cwiseProduct(dw).cwiseQuotient(s);
            VectorXd dxa = dx, dsa = ds, dza = dz, dwa = dw;
            dy = ldlt.solve(rp + A * q.cwiseProduct(v - xi));
            dx = q.cwiseProduct(A.transpose() * dy - v + xi);
            ds = -dx;
            dz = (mu - (x.cwiseProduct(z)).array() - dxa.cwiseProduct(dza).array() - z.cwiseProduct(dx).array())
                     .matrix()
                     .cwiseQuotient(x);
            dw = (mu - (s.cwiseProduct(w)).array() - dsa.cwiseProduct(dwa).array() + w.cwiseProduct(dx).array())
                     .matrix()
                     .cwiseQuotient(s);
            ap = std::min(1.0, eta * std::min(max_step(x, dx), max_step(s, ds)));
            ad = std::min(1.0, eta * std::min(max_step(z, dz), max_step(w, dw)));
        }
        x += ap * dx;
        s += ap * ds;
        dual += ad * dy;
        z += ad * dz;
        w += ad * dw;
        if (!x.allFinite() || !dual.allFinite()) return false;
    }
    beta = -(dual.cwiseQuotient(sx)) * sy;
    return iters < opt.max_iter;
}

}  // namespace

double qr_loss(const QRDesign& d, const VectorXd& beta) {
    auto w = weighted_system(d);
    return loss_of(w.y, w.Z, beta, d.tau);
}

QRFit qr_fit_exhaustive(const QRDesign& d) {
    d.validate();
    if (d.y.size() > 30) throw Error(Errc::InvalidArgument, "exhaustive search limited to n <= 30");
    auto ws = weighted_system(d);
    check_rank(ws.Z);
    VertexSearch vs{ws.y, ws.Z, d.tau, false, std::numeric_limits<double>::infinity(), VectorXd()};
    std::vector<Eigen::Index> all(static_cast<std::size_t>(ws.y.size()));
    std::iota(all.begin(), all.end(), 0);
    vs.enumerate(all);
    if (!vs.found) throw Error(Errc::DegenerateDesign, "no nonsingular p-subset");
    QRFit f;
    f.beta = vs.best;
    f.loss = vs.best_loss;
    f.r1 = r1_of(d, f.loss);
    f.n_obs = static_cast<int>(d.y.size());
    f.exhaustive = true;
    return f;
}

QRFit qr_fit(const QRDesign& d, const QROptions& opt) {
    d.validate();
    auto ws = weighted_system(d);
    check_rank(ws.Z);
    const Eigen::Index n = ws.y.size(), p = ws.Z.cols();

    VectorXd beta;
    int iters = 0;
    bool ok = interior_point(ws.y, ws.Z, d.tau, opt, beta, iters);
    if (!ok || !beta.allFinite()) {
        if (n <= 30) return qr_fit_exhaustive(d);
        throw Error(Errc::NonConvergence, "interior point did not converge in " + std::to_string(opt.max_iter) +
                                              " iterations");
    }
    double ipm_loss = loss_of(ws.y, ws.Z, beta, d.tau);

    // Move to an optimal vertex: enumerate p-subsets among the smallest residuals.
    VectorXd res = (ws.y - ws.Z * beta).cwiseAbs();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    VectorXd best = beta;
    double best_loss = ipm_loss;
    for (Eigen::Index extra : {Eigen::Index(6), Eigen::Index(12)}) {
        std::size_t m = static_cast<std::size_t>(std::min(n, p + extra));
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(m), order.end(),
                          [&](auto a, auto b) { return res[a] < res[b] || (res[a] == res[b] && a < b); });
        std::vector<Eigen::Index> cand(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(m));
        std::sort(cand.begin(), cand.end());
        VertexSearch vs{ws.y, ws.Z, d.tau, false, std::numeric_limits<double>::infinity(), VectorXd()};
        vs.enumerate(cand);
        if (vs.found && vs.best_loss <= ipm_loss * (1.0 + 1e-9) + 1e-13) {
            best = vs.best;
            best_loss = vs.best_loss;
            break;
        }
    }
    QRFit f;
    f.beta = best;
    f.loss = best_loss;
    f.r1 = r1_of(d, f.loss);
    f.n_obs = static_cast<int>(n);
    f.iterations = iters;
    return f;
}

double hit_statistic(const std::vector<double>& returns, const std::vector<double>& quantiles, double tau) {
    if (returns.empty() || returns.size() != quantiles.size())
        throw Error(Errc::AlignmentError, "returns and quantiles must be aligned and nonempty");
    double s = 0;
    for (std::size_t i = 0; i < returns.size(); ++i) s += (returns[i] < quantiles[i] ? 1.0 : 0.0) - tau;
    return 100.0 * s / static_cast<double>(returns.size());
}

double r1_oos(const std::vector<double>& returns, const std::vector<double>& forecast, int window, double tau) {
    if (returns.size() != forecast.size()) throw Error(Errc::AlignmentError, "returns and forecast misaligned");
    if (window < 20) throw Error(Errc::InvalidArgument, "rolling window must be at least 20");
    if (static_cast<std::size_t>(window) >= returns.size())
        throw Error(Errc::WindowTooLong, "window not shorter than the sample");
    double num = 0, den = 0;
    for (std::size_t t = static_cast<std::size_t>(window); t < returns.size(); ++t) {
        std::vector<double> past(returns.begin() + static_cast<std::ptrdiff_t>(t) - window,
                                 returns.begin() + static_cast<std::ptrdiff_t>(t));
        double bench = empirical_quantile(std::move(past), tau);
        num += pinball(returns[t] - forecast[t], tau);
        den += pinball(returns[t] - bench, tau);
    }
    if (den <= 0) return std::nan("");
    return 1.0 - num / den;
}

double wald_test(const QRFit& fit, const MatrixXd& A, const VectorXd& b) {
    if (!fit.cov_boot) throw Error(Errc::SingularCovariance, "fit carries no covariance");
    if (A.cols() != fit.beta.size() || A.rows() != b.size())
        throw Error(Errc::InvalidArgument, "restriction dimensions do not match beta");
    VectorXd g = A * fit.beta - b;
    if (g.cwiseAbs().maxCoeff() == 0.0) return 1.0;
    MatrixXd V = A * (*fit.cov_boot) * A.transpose();
    Eigen::FullPivLU<MatrixXd> lu(V);
    lu.setThreshold(1e-14);
    if (!lu.isInvertible()) throw Error(Errc::SingularCovariance, "A Sigma A' is singular");
    double stat = g.dot(lu.solve(g));
    Eigen::FullPivLU<MatrixXd> lua(A);
    return chi2_sf(stat, static_cast<double>(lua.rank()));
}

std::vector<double> expanding_forecast(const VectorXd& y, const MatrixXd& X, int initial_window, double tau,
                                       int cadence) {
    const Eigen::Index n = y.size();
    if (initial_window < 100) throw Error(Errc::InvalidArgument, "initial window must be at least 100");
    if (initial_window >= n) throw Error(Errc::WindowTooLong, "initial window not shorter than the sample");
    if (X.rows() != n) throw Error(Errc::AlignmentError, "regressors and responses misaligned");
    if (cadence < 1) cadence = 1;
    std::vector<double> out(static_cast<std::size_t>(n), std::nan(""));
    VectorXd beta;
    for (Eigen::Index t = initial_window; t < n; ++t) {
        if ((t - initial_window) % cadence == 0) {
            QRDesign d;
            d.y = y.head(t);
            d.X = X.topRows(t);
            d.tau = tau;
            beta = qr_fit(d).beta;
        }
        double f = beta[0];
        for (Eigen::Index j = 0; j < X.cols(); ++j) f += beta[j + 1] * X(t, j);
        out[static_cast<std::size_t>(t)] = f;
    }
    return out;
}

double crossing_rate(const std::vector<std::vector<double>>& preds) {
    if (preds.size() < 2) return 0.0;
    std::size_t T = preds.front().size(), bad = 0, total = 0;
    for (std::size_t j = 0; j + 1 < preds.size(); ++j) {
        if (preds[j].size() != T || preds[j + 1].size() != T) throw Error(Errc::AlignmentError, "ragged predictions");
        for (std::size_t t = 0; t < T; ++t) {
            ++total;
            if (preds[j + 1][t] < preds[j][t]) ++bad;
        }
    }
    return total ? static_cast<double>(bad) / static_cast<double>(total) : 0.0;
}

}  // namespace qb
