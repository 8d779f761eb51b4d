#include "qbound/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qbound/bootstrap.hpp"
#include "qbound/error.hpp"
#include "qbound/numerics.hpp"

namespace qb {

const char* bound_kind_name(BoundKind k) {
    switch (k) {
        case BoundKind::Local: return "local";
        case BoundKind::Snow: return "snow";
        case BoundKind::LogEntropy: return "log_entropy";
        case BoundKind::Liu: return "liu";
    }
    return "?";
}

BoundKind parse_bound_kind(const std::string& s) {
    if (s == "local") return BoundKind::Local;
    if (s == "snow") return BoundKind::Snow;
    if (s == "log_entropy") return BoundKind::LogEntropy;
    if (s == "liu") return BoundKind::Liu;
    throw Error(Errc::InvalidArgument, "unknown bound kind '" + s + "'");
}

ODC odc(const DistributionEstimate& physical_cdf, const QuantileCurve& q) {
    if (q.taus.empty() || q.taus.size() != q.values.size()) throw Error(Errc::GridMismatch, "empty or ragged quantile curve");
    if (q.horizon_days && physical_cdf.horizon_days && q.horizon_days != physical_cdf.horizon_days)
        throw Error(Errc::GridMismatch, "horizons differ between the physical cdf and quantile curve");
    ODC o;
    o.taus = q.taus;
    o.phi.reserve(q.taus.size());
    for (double v : q.values) o.phi.push_back(physical_cdf.cdf_at(v));
    return o;
}

BoundCurve local_bound(const ODC& o, double rf, double epsilon) {
    if (!(rf > 0)) throw Error(Errc::InvalidArgument, "rf must be positive");
    BoundCurve b;
    b.kind = BoundKind::Local;
    b.rf = rf;
    for (std::size_t i = 0; i < o.taus.size(); ++i) {
        double t = o.taus[i], f = o.phi[i];
        if (t < epsilon - 1e-12 || t > 1 - epsilon + 1e-12) continue;
        double v;
        if (t == f)
            v = 0;
        else if (f <= 0 || f >= 1)
            v = std::numeric_limits<double>::infinity();
        else
            v = std::abs(t - f) / (std::sqrt(f * (1 - f)) * rf);
        b.taus.push_back(t);
        b.values.push_back(v);
    }
    return b;
}

double hj_bound(double m, double sd, double rf) {
    if (!(sd > 0)) throw Error(Errc::ZeroVariance, "return standard deviation must be positive");
    return std::abs(m - rf) / (sd * rf);
}

double epanechnikov_cdf(double u) {
    if (u <= -1) return 0;
    if (u >= 1) return 1;
    return 0.5 + 0.75 * u - 0.25 * u * u * u;
}

double epanechnikov_pdf(double u) { return std::abs(u) < 1 ? 0.75 * (1 - u * u) : 0.0; }

double silverman_bandwidth(const std::vector<double>& x) {
    double sd = sample_sd(x);
    // Round-off spread in a constant sample counts as zero.
    if (sd <= 1e-12 * std::max(1.0, std::abs(mean(x)))) return 0.0;
    std::vector<double> s = x;
    std::sort(s.begin(), s.end());
    auto q = [&](double p) {
        double pos = p * static_cast<double>(s.size() - 1);
        std::size_t i = static_cast<std::size_t>(pos);
        double w = pos - static_cast<double>(i);
        return i + 1 < s.size() ? s[i] * (1 - w) + s[i + 1] * w : s[i];
    };
    double iqr = (q(0.75) - q(0.25)) / 1.349;
    double spread = iqr > 0 ? std::min(sd, iqr) : sd;
    return 0.9 * spread * std::pow(static_cast<double>(x.size()), -0.2);
}

double cv_bandwidth(const std::vector<double>& x) {
    const std::size_t n = x.size();
    double h0 = silverman_bandwidth(x);
    if (!(h0 > 0)) return 0.0;
    std::vector<double> s = x;
    std::sort(s.begin(), s.end());
    const double nn = static_cast<double>(n);
    double best_h = h0, best = std::numeric_limits<double>::infinity();
    for (double mult : logspace(0.1, 10.0, 40)) {
        double h = mult * h0;
        auto grid = linspace(s.front() - h, s.back() + h, 512);
        double dx = grid[1] - grid[0];
        double score = 0;
        for (double g : grid) {
            std::vector<double> k(n);
            double tot = 0;
            for (std::size_t i = 0; i < n; ++i) {
                k[i] = epanechnikov_cdf((g - s[i]) / h);
                tot += k[i];
            }
            double acc = 0;
            for (std::size_t i = 0; i < n; ++i) {
                double loo = (tot - k[i]) / (nn - 1);
                double ind = s[i] <= g ? 1.0 : 0.0;
                acc += (ind - loo) * (ind - loo);
            }
            score += acc * dx;
        }
        if (score < best) {
            best = score;
            best_h = h;
        }
    }
    return best_h;
}

double kernel_cdf_at(const std::vector<double>& r, double h, double x) {
    double acc = 0;
    for (double v : r) acc += epanechnikov_cdf((x - v) / h);
    return acc / static_cast<double>(r.size());
}

KernelCdf kernel_cdf(const std::vector<double>& returns, std::optional<double> bandwidth, std::size_t n_grid,
                     int horizon_days) {
    if (returns.size() < 30) throw Error(Errc::TooFewObservations, "kernel cdf needs at least 30 observations");
    double h = bandwidth ? *bandwidth : cv_bandwidth(returns);
    if (!(h > 0)) {
        // Degenerate sample: fall back to a small bandwidth relative to the level.
        double lvl = std::abs(mean(returns));
        h = 1e-3 * (lvl > 0 ? lvl : 1.0);
    }
    auto [mn, mx] = std::minmax_element(returns.begin(), returns.end());
    KernelCdf out;
    out.bandwidth = h;
    auto& d = out.dist;
    d.measure = Measure::Physical;
    d.horizon_days = horizon_days;
    d.grid = linspace(*mn - h, *mx + h, n_grid);
    d.cdf.resize(n_grid);
    d.pdf.resize(n_grid);
    std::vector<double> s = returns;
    std::sort(s.begin(), s.end());
    const double nn = static_cast<double>(s.size());
    for (std::size_t g = 0; g < n_grid; ++g) {
        double x = d.grid[g];
        // Only observations within one bandwidth contribute a partial kernel.
        auto lo = std::lower_bound(s.begin(), s.end(), x - h);
        auto hi = std::upper_bound(s.begin(), s.end(), x + h);
        double c = static_cast<double>(lo - s.begin()), p = 0;
        for (auto it = lo; it != hi; ++it) {
            double u = (x - *it) / h;
            c += epanechnikov_cdf(u);
            p += epanechnikov_pdf(u);
        }
        d.cdf[g] = std::clamp(c / nn, 0.0, 1.0);
        d.pdf[g] = p / (nn * h);
    }
    d.cdf = pava(d.cdf);
    return out;
}

BoundCurve alt_bounds(const ODC& o, const QuantileCurve& q, double rf, BoundKind kind, double param) {
    if (q.taus != o.taus) throw Error(Errc::GridMismatch, "odc and quantile curve use different tau grids");
    if (!(rf > 0)) throw Error(Errc::InvalidArgument, "rf must be positive");
    BoundCurve b;
    b.kind = kind;
    b.rf = rf;
    switch (kind) {
        case BoundKind::Snow:
            if (!(param > 1)) throw Error(Errc::InvalidExponent, "snow bound needs p > 1");
            break;
        case BoundKind::Liu:
            if (!(param < 0)) throw Error(Errc::InvalidExponent, "liu bound needs s < 0");
            break;
        case BoundKind::LogEntropy: break;
        case BoundKind::Local: throw Error(Errc::InvalidArgument, "use local_bound for the local bound");
    }
    for (std::size_t i = 0; i < o.taus.size(); ++i) {
        double t = o.taus[i], f = o.phi[i];
        if (!(f > 0)) continue;  // event carries no physical mass
        double v = 0;
        switch (kind) {
            case BoundKind::Snow: {
                double qexp = param / (param - 1);
                v = (t / rf) * std::pow(f, -1.0 / qexp);
                break;
            }
            case BoundKind::LogEntropy: v = std::log(rf) + std::log(f) - std::log(t); break;
            case BoundKind::Liu: v = std::pow(t / rf, param) * std::pow(f, 1 - param); break;
            case BoundKind::Local: break;
        }
        b.taus.push_back(t);
        b.values.push_back(v);
    }
    return b;
}

namespace {

double local_at(double tau, double phi, double rf) {
    if (phi <= 0 || phi >= 1) return tau == phi ? 0.0 : std::numeric_limits<double>::infinity();
    return std::abs(tau - phi) / (std::sqrt(phi * (1 - phi)) * rf);
}

// Quantile of the average of the selected conditional cdfs, all on a common grid.
double average_quantile(const std::vector<const std::vector<double>*>& cdfs, const std::vector<double>& grid,
                        double tau) {
    const std::size_t G = grid.size();
    std::vector<double> avg(G, 0.0);
    for (const auto* c : cdfs)
        for (std::size_t i = 0; i < G; ++i) avg[i] += (*c)[i];
    for (auto& v : avg) v /= static_cast<double>(cdfs.size());
    DistributionEstimate d;
    d.grid = grid;
    d.cdf = std::move(avg);
    return d.quantile(tau);
}

}  // namespace

DominanceResult dominance_test(const std::vector<double>& returns, const std::vector<DistributionEstimate>& rn_dists,
                               double tau_star, double rf, const DominanceOptions& opt) {
    if (returns.size() != rn_dists.size()) throw Error(Errc::AlignmentError, "returns and distributions misaligned");
    if (opt.n_boot < 100) throw Error(Errc::InsufficientBootstrap, "need at least 100 bootstrap replicates");
    if (tau_star < opt.epsilon || tau_star > 1 - opt.epsilon)
        throw Error(Errc::InvalidArgument, "tau_star outside the trimmed interval");
    const std::size_t T = returns.size();

    DominanceResult res;
    res.tau_star = tau_star;
    res.n_boot = opt.n_boot;
    res.seed = opt.seed;
    res.block_length = opt.block_length;
    res.bandwidth = opt.bandwidth ? *opt.bandwidth : cv_bandwidth(returns);
    if (!(res.bandwidth > 0)) throw Error(Errc::ZeroVariance, "returns have no dispersion");

    bool common = true;
    for (const auto& d : rn_dists)
        if (d.grid != rn_dists.front().grid) {
            common = false;
            break;
        }

    auto stat = [&](const std::vector<std::size_t>& idx) {
        std::vector<double> r(idx.size());
        for (std::size_t i = 0; i < idx.size(); ++i) r[i] = returns[idx[i]];
        double q;
        if (common) {
            std::vector<const std::vector<double>*> cdfs;
            cdfs.reserve(idx.size());
            for (auto i : idx) cdfs.push_back(&rn_dists[i].cdf);
            q = average_quantile(cdfs, rn_dists.front().grid, tau_star);
        } else {
            std::vector<DistributionEstimate> sel;
            sel.reserve(idx.size());
            for (auto i : idx) sel.push_back(rn_dists[i]);
            q = unconditional_rn_cdf(sel).quantile(tau_star);
        }
        double phi = kernel_cdf_at(r, res.bandwidth, q);
        double sd = sample_sd(r);
        double hj = sd > 0 ? std::abs(mean(r) - rf) / (sd * rf) : 0.0;
        return std::pair<double, double>{local_at(tau_star, phi, rf), hj};
    };

    std::vector<std::size_t> all(T);
    for (std::size_t i = 0; i < T; ++i) all[i] = i;
    auto [loc, hj] = stat(all);
    res.local = loc;
    res.hj = hj;
    res.T_stat = loc - hj;

    ResamplePlan plan;
    plan.scheme = Scheme::Stationary;
    plan.block_length = std::min<int>(opt.block_length, static_cast<int>(T));
    plan.n_replicates = opt.n_boot;
    plan.seed = opt.seed;
    std::vector<double> tstar(static_cast<std::size_t>(opt.n_boot));
    parallel_for(tstar.size(), opt.jobs, [&](std::size_t b) {
        auto idx = resample_indices(plan, T, static_cast<int>(b));
        auto [l, h] = stat(idx);
        tstar[b] = l - h;
    });
    std::size_t le = 0;
    for (double t : tstar)
        if (t <= 0) ++le;
    res.p_value = static_cast<double>(le) / static_cast<double>(opt.n_boot);
    return res;
}

}  // namespace qb
