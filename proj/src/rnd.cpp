#include "qbound/rnd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qbound/black_scholes.hpp"
#include "qbound/error.hpp"
#include "qbound/numerics.hpp"

namespace qb {

double Smile::vol_at(double yq) const {
    if (y.size() == 1) return vol.front();
    return MonotoneCubic(y, vol)(yq);
}

double DistributionEstimate::cdf_at(double x) const {
    if (x < grid.front()) return 0.0;
    if (x >= grid.back()) return 1.0;
    return interp_linear(grid, cdf, x);
}

double DistributionEstimate::pdf_at(double x) const {
    if (x < grid.front() || x > grid.back()) return 0.0;
    return interp_linear(grid, pdf, x);
}

double DistributionEstimate::quantile(double tau, bool* truncated) const {
    if (truncated) *truncated = false;
    if (tau <= cdf.front()) {
        if (truncated && tau < cdf.front()) *truncated = true;
        return grid.front();
    }
    if (tau > cdf.back()) {
        if (truncated) *truncated = true;
        return grid.back();
    }
    auto it = std::lower_bound(cdf.begin(), cdf.end(), tau);
    std::size_t i = static_cast<std::size_t>(it - cdf.begin());
    if (i == 0) return grid.front();
    double c0 = cdf[i - 1], c1 = cdf[i];
    if (c1 <= c0) return grid[i];
    return grid[i - 1] + (tau - c0) / (c1 - c0) * (grid[i] - grid[i - 1]);
}

std::vector<std::string> DistributionEstimate::invariant_violations() const {
    std::vector<std::string> v;
    const std::size_t n = grid.size();
    if (n < 2 || cdf.size() != n || pdf.size() != n) {
        v.push_back("grid/cdf/pdf sizes differ or grid too short");
        return v;
    }
    for (std::size_t i = 1; i < n; ++i) {
        if (!(grid[i] > grid[i - 1])) {
            v.push_back("grid not strictly increasing");
            break;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (cdf[i] < 0 || cdf[i] > 1 || (i > 0 && cdf[i] < cdf[i - 1])) {
            v.push_back("cdf not a nondecreasing map into [0,1]");
            break;
        }
    }
    if (cdf.front() > 0.005) v.push_back("cdf(grid.first) > 0.005");
    if (cdf.back() < 0.995) v.push_back("cdf(grid.last) < 0.995");
    double area = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (pdf[i] < 0) {
            v.push_back("negative pdf");
            break;
        }
    }
    for (std::size_t i = 1; i < n; ++i) area += 0.5 * (pdf[i] + pdf[i - 1]) * (grid[i] - grid[i - 1]);
    if (area < 0.99 || area > 1.01) v.push_back("pdf integrates to " + std::to_string(area));
    return v;
}

namespace {

std::optional<double> robust_iv(double p, double f, double k, double T, double D) {
    // A price at the lower no-arbitrage floor carries no time value.
    double floor_price = bs_put(f, k, T, 1e-6, D);
    if (p <= floor_price + 1e-14 * std::max(1.0, k) && p >= D * std::max(k - f, 0.0) - 1e-12) return 1e-6;
    return implied_vol_put(p, f, k, T, D);
}

}  // namespace

DistributionEstimate fit_rn_distribution(const OptionChain& chain, const GridSpec& grid) {
    const double S = chain.underlying;
    if (chain.quotes.size() < 8) throw Error(Errc::TooFewStrikes, "need at least 8 distinct strikes");
    double kmin = chain.quotes.front().strike / S, kmax = chain.quotes.back().strike / S;
    if (kmin > 0.7 || kmax < 1.1) throw Error(Errc::TooFewStrikes, "strikes do not span moneyness [0.7, 1.1]");
    const double T = chain.years();
    const double D = 1.0 / chain.risk_free_gross;
    const double f = chain.forward / S;

    Smile sm;
    sm.years = T;
    sm.rf_gross = chain.risk_free_gross;
    sm.fwd_moneyness = f;
    std::size_t failed = 0;
    for (const auto& q : chain.quotes) {
        double k = q.strike / S;
        auto iv = robust_iv(q.put_mid / S, f, k, T, D);
        if (!iv) {
            ++failed;
            continue;
        }
        sm.y.push_back(std::log(k / f));
        sm.vol.push_back(*iv);
    }
    if (failed * 5 > chain.quotes.size())
        throw Error(Errc::NonconvergentImpliedVol,
                    std::to_string(failed) + " of " + std::to_string(chain.quotes.size()) + " quotes failed");
    if (sm.y.size() < 2) throw Error(Errc::TooFewStrikes, "fewer than two usable implied vols");
    return fit_from_smile(sm, grid, chain.maturity_days, chain.observation_date);
}

DistributionEstimate fit_from_smile(const Smile& smile, const GridSpec& spec, int horizon_days,
                                    std::optional<Date> date) {
    if (spec.n < 5 || !(spec.hi > spec.lo) || !(spec.lo > 0)) throw Error(Errc::InvalidArgument, "bad grid spec");
    const std::size_t n = spec.n;
    const double D = 1.0 / smile.rf_gross, Rf = smile.rf_gross, f = smile.fwd_moneyness, T = smile.years;
    DistributionEstimate d;
    d.grid = linspace(spec.lo, spec.hi, n);
    d.measure = Measure::RiskNeutral;
    d.date = date;
    d.horizon_days = horizon_days;
    d.rf_gross = Rf;
    d.smile = smile;

    MonotoneCubic interp;
    if (smile.y.size() > 1) interp = MonotoneCubic(smile.y, smile.vol);
    auto vol = [&](double x) { return smile.y.size() > 1 ? interp(std::log(x / f)) : smile.vol.front(); };

    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = bs_put(f, d.grid[i], T, vol(d.grid[i]), D);

    std::vector<double> c(n), pdf(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t a = i == 0 ? 0 : i - 1, b = i + 1 == n ? n - 1 : i + 1;
        c[i] = Rf * (p[b] - p[a]) / (d.grid[b] - d.grid[a]);
        c[i] = std::clamp(c[i], 0.0, 1.0);
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        double h1 = d.grid[i] - d.grid[i - 1], h2 = d.grid[i + 1] - d.grid[i];
        double second = 2.0 * (h1 * p[i + 1] - (h1 + h2) * p[i] + h2 * p[i - 1]) / (h1 * h2 * (h1 + h2));
        pdf[i] = std::max(0.0, Rf * second);
    }
    pdf[0] = pdf[1];
    pdf[n - 1] = pdf[n - 2];
    d.cdf = pava(c);
    d.pdf = std::move(pdf);
    return d;
}

DistributionEstimate interpolate_maturity(const DistributionEstimate& a, const DistributionEstimate& b,
                                          int target_days, const GridSpec& grid) {
    if (target_days == a.horizon_days) return a;
    if (target_days == b.horizon_days) return b;
    if (!(a.horizon_days < target_days && target_days < b.horizon_days))
        throw Error(Errc::BracketingError, "target horizon " + std::to_string(target_days) + " not inside (" +
                                               std::to_string(a.horizon_days) + ", " +
                                               std::to_string(b.horizon_days) + ")");
    if (!a.smile || !b.smile) throw Error(Errc::InvalidArgument, "maturity interpolation needs fitted smiles");
    if (a.date && b.date && *a.date != *b.date) throw Error(Errc::InvalidArgument, "distributions from different dates");
    const Smile& sa = *a.smile;
    const Smile& sb = *b.smile;
    double T = target_days / 365.0;
    double w = (T - sa.years) / (sb.years - sa.years);

    std::vector<double> ys = sa.y;
    ys.insert(ys.end(), sb.y.begin(), sb.y.end());
    std::sort(ys.begin(), ys.end());
    ys.erase(std::unique(ys.begin(), ys.end(), [](double u, double v) { return std::abs(u - v) < 1e-12; }), ys.end());

    Smile out;
    out.years = T;
    out.rf_gross = std::exp((1 - w) * std::log(sa.rf_gross) + w * std::log(sb.rf_gross));
    out.fwd_moneyness = std::exp((1 - w) * std::log(sa.fwd_moneyness) + w * std::log(sb.fwd_moneyness));
    for (double y : ys) {
        double va = sa.vol_at(y), vb = sb.vol_at(y);
        double tv = (1 - w) * va * va * sa.years + w * vb * vb * sb.years;
        out.y.push_back(y);
        out.vol.push_back(std::sqrt(std::max(tv, 1e-16) / T));
    }
    return fit_from_smile(out, grid, target_days, a.date ? a.date : b.date);
}

QuantileCurve rn_quantile_curve(const DistributionEstimate& dist, const std::vector<double>& taus) {
    QuantileCurve q;
    q.taus = taus;
    q.kind = dist.measure == Measure::RiskNeutral ? CurveKind::RnQuantile : CurveKind::PhysicalQuantile;
    q.horizon_days = dist.horizon_days;
    q.values.reserve(taus.size());
    q.truncated.reserve(taus.size());
    for (double t : taus) {
        if (!(t > 0 && t < 1)) throw Error(Errc::InvalidArgument, "taus must lie in (0,1)");
        bool tr = false;
        q.values.push_back(dist.quantile(t, &tr));
        q.truncated.push_back(tr);
    }
    return q;
}

DistributionEstimate unconditional_rn_cdf(const std::vector<DistributionEstimate>& dists) {
    if (dists.empty()) throw Error(Errc::InsufficientData, "no distributions to average");
    if (dists.size() == 1) return dists.front();
    for (const auto& d : dists)
        if (d.horizon_days != dists.front().horizon_days)
            throw Error(Errc::MixedHorizon, "distributions have different horizons");

    bool same = true;
    for (const auto& d : dists)
        if (d.grid != dists.front().grid) {
            same = false;
            break;
        }
    DistributionEstimate out;
    out.measure = dists.front().measure;
    out.horizon_days = dists.front().horizon_days;
    double rf = 0;
    for (const auto& d : dists) rf += d.rf_gross;
    out.rf_gross = rf / static_cast<double>(dists.size());

    if (same) {
        out.grid = dists.front().grid;
        out.cdf.assign(out.grid.size(), 0.0);
        out.pdf.assign(out.grid.size(), 0.0);
        for (const auto& d : dists)
            for (std::size_t i = 0; i < out.grid.size(); ++i) {
                out.cdf[i] += d.cdf[i];
                out.pdf[i] += d.pdf[i];
            }
    } else {
        for (const auto& d : dists) out.grid.insert(out.grid.end(), d.grid.begin(), d.grid.end());
        std::sort(out.grid.begin(), out.grid.end());
        out.grid.erase(std::unique(out.grid.begin(), out.grid.end()), out.grid.end());
        out.cdf.assign(out.grid.size(), 0.0);
        out.pdf.assign(out.grid.size(), 0.0);
        for (const auto& d : dists)
            for (std::size_t i = 0; i < out.grid.size(); ++i) {
                out.cdf[i] += d.cdf_at(out.grid[i]);
                out.pdf[i] += d.pdf_at(out.grid[i]);
            }
    }
    const double inv = 1.0 / static_cast<double>(dists.size());
    for (auto& v : out.cdf) v *= inv;
    for (auto& v : out.pdf) v *= inv;
    out.cdf = pava(out.cdf);
    return out;
}

double partial_expectation(const DistributionEstimate& dist, const std::function<double(double)>& g,
                           double tau_cap) {
    const auto& x = dist.grid;
    const auto& c = dist.cdf;
    const std::size_t n = x.size();
    double cap = std::min(tau_cap, 1.0);
    if (cap <= 0) return 0.0;
    double total = std::min(c[0], cap) * g(x[0]);
    if (cap <= c[0]) return total;
    double g_prev = g(x[0]);
    for (std::size_t i = 1; i < n; ++i) {
        double lo = c[i - 1], hi = c[i];
        if (cap < hi) {
            double xq = x[i - 1] + (cap - lo) / (hi - lo) * (x[i] - x[i - 1]);
            double gm = g(0.5 * (x[i - 1] + xq)), gq = g(xq);
            total += (cap - lo) * (g_prev + 4 * gm + gq) / 6.0;
            return total;
        }
        double g_next = g(x[i]);
        if (hi > lo) total += (hi - lo) * (g_prev + 4 * g(0.5 * (x[i - 1] + x[i])) + g_next) / 6.0;
        g_prev = g_next;
    }
    if (cap > c[n - 1]) total += (cap - c[n - 1]) * g(x[n - 1]);
    return total;
}

double rn_moment(const DistributionEstimate& dist, int n, double rf) {
    return rn_truncated_moment(dist, n, rf, 1.0);
}

double rn_truncated_moment(const DistributionEstimate& dist, int n, double rf, double tau_cap) {
    if (n < 1 || n > 4) throw Error(Errc::InvalidArgument, "moment order must be 1..4");
    if (!(tau_cap > 0 && tau_cap <= 1)) throw Error(Errc::InvalidArgument, "tau_cap must lie in (0,1]");
    return partial_expectation(dist, [&](double x) { return std::pow(x - rf, n); }, tau_cap);
}

DistributionEstimate distribution_from_functions(const std::function<double(double)>& cdf,
                                                 const std::function<double(double)>& pdf, const GridSpec& grid,
                                                 Measure measure, int horizon_days, double rf_gross) {
    DistributionEstimate d;
    d.grid = linspace(grid.lo, grid.hi, grid.n);
    d.cdf.resize(grid.n);
    d.pdf.resize(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) {
        d.cdf[i] = std::clamp(cdf(d.grid[i]), 0.0, 1.0);
        d.pdf[i] = std::max(0.0, pdf(d.grid[i]));
    }
    d.cdf = pava(d.cdf);
    d.measure = measure;
    d.horizon_days = horizon_days;
    d.rf_gross = rf_gross;
    return d;
}

DistributionEstimate lognormal_distribution(double m, double s, const GridSpec& grid, Measure measure,
                                            int horizon_days, double rf_gross) {
    return distribution_from_functions([&](double x) { return normal_cdf((std::log(x) - m) / s); },
                                       [&](double x) { return normal_pdf((std::log(x) - m) / s) / (s * x); }, grid,
                                       measure, horizon_days, rf_gross);
}

}  // namespace qb
