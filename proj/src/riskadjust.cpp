#include "qbound/riskadjust.hpp"

#include <cmath>
#include <limits>

#include "qbound/error.hpp"
#include "qbound/numerics.hpp"

namespace qb {

UtilityCoeffs UtilityCoeffs::empirical(double rf) {
    UtilityCoeffs c;
    c.theta = {1 / rf, -1 / (rf * rf), 1 / (rf * rf * rf)};
    c.source = ThetaSource::EmpiricalDefault;
    return c;
}

UtilityCoeffs UtilityCoeffs::from_utility(const Utility& u, double rf) {
    UtilityCoeffs c;
    c.source = ThetaSource::ModelDerived;
    double g = u.gamma;
    switch (u.kind) {
        case UtilityKind::Log: c.theta = {1 / rf, 0, 0}; break;
        case UtilityKind::Crra:
            c.theta = {g / rf, g * (g - 1) / (2 * rf * rf), g * (g - 1) * (g - 2) / (6 * rf * rf * rf)};
            break;
        case UtilityKind::Exponential: c.theta = {g, g * g / 2, g * g * g / 6}; break;
    }
    return c;
}

MomentSet rn_moment_set(const DistributionEstimate& dist, double rf, double tau) {
    MomentSet m;
    for (int k = 1; k <= 3; ++k) {
        m.full[k - 1] = rn_moment(dist, k, rf);
        m.trunc[k - 1] = rn_truncated_moment(dist, k, rf, tau);
    }
    return m;
}

double lower_bound_from_moments(const MomentSet& m, double tau, const UtilityCoeffs& th) {
    double num = 0, den = 1;
    for (int k = 0; k < 3; ++k) {
        num += th.theta[k] * (tau * m.full[k] - m.trunc[k]);
        den += th.theta[k] * m.full[k];
    }
    if (!std::isfinite(num) || !std::isfinite(den)) throw Error(Errc::MomentUndefined, "moments are not finite");
    if (!(den > 0)) throw Error(Errc::DenominatorNonpositive, "lower-bound denominator is " + std::to_string(den));
    return num / den;
}

double feasible_lb(const DistributionEstimate& dist, double rf, double tau) {
    return feasible_lb(dist, rf, tau, UtilityCoeffs::empirical(rf));
}

double feasible_lb(const DistributionEstimate& dist, double rf, double tau, const UtilityCoeffs& theta) {
    if (!(tau > 0 && tau <= 0.5)) throw Error(Errc::InvalidArgument, "tau must lie in (0, 0.5]");
    return lower_bound_from_moments(rn_moment_set(dist, rf, tau), tau, theta);
}

double gateaux_ra(double lb, const DistributionEstimate& dist, double tau, double h) {
    if (!(h > 0) || tau - h < 0.001 - 1e-12 || tau + h > 0.999 + 1e-12)
        throw Error(Errc::StepOutOfRange, "tau +/- h leaves the quantile grid");
    if (lb == 0) return 0.0;
    double dq = dist.quantile(tau + h) - dist.quantile(tau - h);
    return lb * dq / (2 * h);
}

double quantile_predictor(double q_tilde, double ra) { return q_tilde + ra; }

RiskAdjustment risk_adjustment(const DistributionEstimate& dist, double tau, double h) {
    RiskAdjustment r;
    r.date = dist.date;
    r.horizon_days = dist.horizon_days;
    r.tau = tau;
    r.q_tilde = dist.quantile(tau);
    r.lb = feasible_lb(dist, dist.rf_gross, tau);
    double dq = dist.quantile(tau + h) - dist.quantile(tau - h);
    if (!(dq > 0)) throw Error(Errc::StepOutOfRange, "flat quantile function around tau");
    r.pdf_at_q = 2 * h / dq;
    r.ra = gateaux_ra(r.lb, dist, tau, h);
    r.q_hat = quantile_predictor(r.q_tilde, r.ra);
    return r;
}

double predictor_crossing_rate(const std::vector<RiskAdjustment>& v) {
    if (v.size() < 2) return 0.0;
    std::size_t bad = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i].q_hat < v[i - 1].q_hat) ++bad;
    return static_cast<double>(bad) / static_cast<double>(v.size() - 1);
}

double gateaux_first_order(const DistributionEstimate& rn, const DistributionEstimate& physical, double tau) {
    double q = rn.quantile(tau);
    double f = rn.pdf_at(q);
    if (!(f > 0)) throw Error(Errc::InvalidArgument, "zero risk-neutral density at the quantile");
    return (tau - physical.cdf_at(q)) / f;
}

namespace {

double remainder_G(const Utility& u, double x, double rf) {
    double d = x - rf;
    if (d == 0) return 0.0;
    double integral = adaptive_simpson(
        [&](double s) {
            double a = 1 - s;
            return u.zeta4(rf + s * d, rf) * a * a * a;
        },
        0.0, 1.0, 1e-12);
    return d * d * d * d / 24.0 * integral;
}

}  // namespace

double validity_gamma_prime(const Utility& u, const DistributionEstimate& dist, double tau) {
    double rf = dist.rf_gross;
    double eg = partial_expectation(dist, [&](double x) { return remainder_G(u, x, rf); });
    return remainder_G(u, dist.quantile(tau), rf) - eg;
}

TauStar validity_tau_star(const Utility& u, const DistributionEstimate& dist) {
    if (u.kind == UtilityKind::Exponential)
        throw Error(Errc::UnsupportedUtility, "exponential utility has a positive fourth derivative");
    TauStar out;
    bool zero4 = u.kind == UtilityKind::Log ||
                 (u.kind == UtilityKind::Crra && (u.gamma == 0 || u.gamma == 1 || u.gamma == 2 || u.gamma == 3));
    if (zero4) return out;
    double rf = dist.rf_gross;
    double eg = partial_expectation(dist, [&](double x) { return remainder_G(u, x, rf); });
    auto gp = [&](double t) { return remainder_G(u, dist.quantile(t), rf) - eg; };
    double lo = 0.001, hi = 0.5;
    double flo = gp(lo), fhi = gp(hi);
    if (flo == 0) {
        out.tau_star = lo;
        return out;
    }
    if ((flo < 0) == (fhi < 0)) {
        auto sg = [](double v) { return v < 0 ? "-" : "+"; };
        throw Error(Errc::NoRoot, std::string("Gamma' has sign ") + sg(flo) + " at tau=0.001 and " + sg(fhi) +
                                      " at tau=0.5");
    }
    out.tau_star = bisect(gp, lo, hi, 1e-9);
    return out;
}

double crash_prob_log_utility(const DistributionEstimate& dist, double rf, double tau) {
    if (!(tau > 0 && tau < 1)) throw Error(Errc::InvalidArgument, "tau must lie in (0,1)");
    return (rn_truncated_moment(dist, 1, rf, tau) + rf * tau) / rf;
}

}  // namespace qb

namespace qb {

MomentSet lognormal_moment_set(double m, double s, double rf, double tau) {
    double lq = m + s * normal_quantile(tau);
    // E[R^j] and E[R^j 1{R <= q}] for j = 0..3.
    double raw[4], part[4];
    for (int j = 0; j <= 3; ++j) {
        raw[j] = std::exp(j * m + 0.5 * j * j * s * s);
        part[j] = raw[j] * normal_cdf((lq - m - j * s * s) / s);
    }
    static const double binom[4][4] = {{1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}};
    MomentSet out;
    for (int k = 1; k <= 3; ++k) {
        double f = 0, t = 0;
        for (int j = 0; j <= k; ++j) {
            double c = binom[k][j] * std::pow(-rf, k - j);
            f += c * raw[j];
            t += c * part[j];
        }
        out.full[k - 1] = f;
        out.trunc[k - 1] = t;
    }
    return out;
}

}  // namespace qb
