#include "qbound/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qbound/error.hpp"
#include "qbound/numerics.hpp"

namespace qb {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool rn(Measure m) { return m == Measure::RiskNeutral; }

void require_positive(double x) {
    if (!(x > 0)) throw Error(Errc::OutOfSupport, "gross return must be positive");
}

// Standard-normal variable of the joint-normal risk-neutral cdf Phi(z) - Rf rho sigma_M phi(z).
double jn_rn_cdf_z(const JointNormal& m, double z) {
    return normal_cdf(z) - m.rf() * m.rho * m.sigma_M * normal_pdf(z);
}

double jn_rn_quantile_z(const JointNormal& m, double tau) {
    double k = m.rf() * m.rho * m.sigma_M;
    double lo = -40, hi = 40;
    // Restrict to the region where the risk-neutral cdf is increasing.
    if (k > 0) lo = std::max(lo, -1.0 / k);
    if (k < 0) hi = std::min(hi, -1.0 / k);
    return bisect([&](double z) { return jn_rn_cdf_z(m, z) - tau; }, lo, hi, 1e-13);
}

struct LnParams {
    double m, s;
};

LnParams ln_params(const Lognormal& l, bool risk_neutral) {
    double drift = risk_neutral ? l.r_f : l.mu_R;
    return {(drift - 0.5 * l.sigma_R * l.sigma_R) * l.lambda, l.sigma_R * std::sqrt(l.lambda)};
}

struct DisParams {
    double mu, sigma, kappa, theta, nu;
};

DisParams dis_params(const Disaster& d, bool risk_neutral) {
    DisParams p{d.mu, d.sigma, d.kappa, d.theta, d.nu};
    if (risk_neutral) {
        p.kappa = d.kappa * std::exp(-d.gamma * d.theta + 0.5 * d.gamma * d.gamma * d.nu * d.nu);
        p.theta = d.theta - d.gamma * d.nu * d.nu;
        if (d.tilt_diffusion) p.mu = d.mu - d.gamma * d.sigma * d.sigma;
    }
    return p;
}

double dc_quantile(const Disaster& d, double tau, bool risk_neutral) {
    if (!(tau > 0 && tau < 1)) throw Error(Errc::InvalidArgument, "tau must lie in (0,1)");
    auto f = [&](double x) { return disaster_dc_cdf(d, x, risk_neutral) - tau; };
    double lo = d.mu - 1, hi = d.mu + 1;
    while (f(lo) > 0) lo -= 1;
    while (f(hi) < 0) hi += 1;
    return bisect(f, lo, hi, 1e-14);
}

double local_value(double tau, double phi, double rf) {
    if (tau == phi) return 0.0;
    if (phi <= 0 || phi >= 1) return std::numeric_limits<double>::infinity();
    return std::abs(tau - phi) / (std::sqrt(phi * (1 - phi)) * rf);
}

}  // namespace

JointNormal JointNormal::priced(double sigma_R, double rf, double sigma_M, double rho) {
    JointNormal m;
    m.sigma_R = sigma_R;
    m.mu_M = 1.0 / rf;
    m.sigma_M = sigma_M;
    m.rho = rho;
    m.mu_R = rf * (1 - rho * sigma_M * sigma_R);
    return m;
}

Lognormal Lognormal::priced(double sigma_R, double r_f, double sigma_M, double rho, double lambda) {
    Lognormal m;
    m.sigma_R = sigma_R;
    m.r_f = r_f;
    m.sigma_M = sigma_M;
    m.rho = rho;
    m.lambda = lambda;
    m.mu_R = r_f - rho * sigma_R * sigma_M;
    return m;
}

Pareto Pareto::calibrate(double beta, double ep, double rf) {
    if (!(beta > 0 && beta < 1)) throw Error(Errc::InvalidArgument, "beta must lie in (0,1)");
    Pareto p;
    p.beta = beta;
    p.B = (rf + ep) * (1 - beta);
    if (!(p.B < rf)) throw Error(Errc::InvalidArgument, "equity premium too small for this beta");
    double a1 = beta * rf / (rf - p.B);
    p.alpha = a1 - 1;
    p.A = a1 / rf;
    if (!(p.alpha > 0)) throw Error(Errc::InvalidArgument, "calibration gives alpha <= 0");
    return p;
}

Pareto Pareto::with_beta(double A, double alpha, double beta) {
    Pareto p;
    p.A = A;
    p.alpha = alpha;
    p.beta = beta;
    p.B = (alpha - beta + 1) / A;
    if (!(p.B > 0)) throw Error(Errc::InvalidArgument, "beta too large for alpha");
    return p;
}

double Utility::zeta(double x, double rf) const {
    switch (kind) {
        case UtilityKind::Log: return x / rf;
        case UtilityKind::Crra: return std::pow(x / rf, gamma);
        case UtilityKind::Exponential: return std::exp(gamma * (x - rf));
    }
    return 1;
}

double Utility::zeta4(double x, double rf) const {
    switch (kind) {
        case UtilityKind::Log: return 0.0;
        case UtilityKind::Crra:
            return gamma * (gamma - 1) * (gamma - 2) * (gamma - 3) * std::pow(x, gamma - 4) / std::pow(rf, gamma);
        case UtilityKind::Exponential: return std::pow(gamma, 4) * std::exp(gamma * (x - rf));
    }
    return 0;
}

std::string Utility::name() const {
    switch (kind) {
        case UtilityKind::Log: return "log";
        case UtilityKind::Crra: return "crra";
        case UtilityKind::Exponential: return "exponential";
    }
    return "?";
}

std::string model_name(const ModelSpec& m) {
    return std::visit(overloaded{[](const JointNormal&) { return std::string("joint_normal"); },
                                 [](const Lognormal&) { return std::string("lognormal"); },
                                 [](const Pareto&) { return std::string("pareto"); },
                                 [](const Disaster&) { return std::string("disaster"); },
                                 [](const RepAgent&) { return std::string("rep_agent"); }},
                      m);
}

double disaster_mgf(const Disaster& d, double u, bool risk_neutral) {
    auto p = dis_params(d, risk_neutral);
    return std::exp(u * p.mu + 0.5 * u * u * p.sigma * p.sigma +
                    p.kappa * (std::exp(u * p.theta + 0.5 * u * u * p.nu * p.nu) - 1));
}

double disaster_rf(const Disaster& d) { return 1.0 / (d.beta_discount * disaster_mgf(d, -d.gamma, false)); }

double disaster_scale(const Disaster& d) { return disaster_rf(d) / disaster_mgf(d, d.leverage, true); }

double disaster_dc_cdf(const Disaster& d, double x, bool risk_neutral) {
    auto p = dis_params(d, risk_neutral);
    double acc = 0, w = std::exp(-p.kappa);
    for (int j = 0; j <= d.j_max; ++j) {
        if (j > 0) w *= p.kappa / j;
        acc += w * normal_cdf((x - p.mu - j * p.theta) / std::sqrt(p.sigma * p.sigma + j * p.nu * p.nu));
    }
    return acc;
}

double model_rf(const ModelSpec& m) {
    return std::visit(overloaded{[](const JointNormal& j) { return j.rf(); },
                                 [](const Lognormal& l) { return std::exp(l.r_f * l.lambda); },
                                 [](const Pareto& p) { return p.rf(); },
                                 [](const Disaster& d) { return disaster_rf(d); },
                                 [](const RepAgent& r) { return r.base_rn.rf_gross; }},
                      m);
}

double model_cdf(const ModelSpec& m, Measure measure, double x) {
    return std::visit(
        overloaded{
            [&](const JointNormal& j) {
                double z = (x - j.mu_R) / j.sigma_R;
                return rn(measure) ? jn_rn_cdf_z(j, z) : normal_cdf(z);
            },
            [&](const Lognormal& l) {
                require_positive(x);
                auto p = ln_params(l, rn(measure));
                return normal_cdf((std::log(x) - p.m) / p.s);
            },
            [&](const Pareto& p) {
                if (x < p.B) throw Error(Errc::OutOfSupport, "pareto return below B");
                double e = rn(measure) ? (p.alpha + 1) / p.beta : 1.0 / p.beta;
                return 1 - std::pow(x / p.B, -e);
            },
            [&](const Disaster& d) {
                require_positive(x);
                return disaster_dc_cdf(d, std::log(x / disaster_scale(d)) / d.leverage, rn(measure));
            },
            [&](const RepAgent& r) {
                if (rn(measure)) return r.base_rn.cdf_at(x);
                return physical_from_utility(r.base_rn, r.utility).cdf_at(x);
            }},
        m);
}

double model_quantile(const ModelSpec& m, Measure measure, double tau) {
    if (!(tau > 0 && tau < 1)) throw Error(Errc::InvalidArgument, "tau must lie in (0,1)");
    return std::visit(
        overloaded{
            [&](const JointNormal& j) {
                double z = rn(measure) ? jn_rn_quantile_z(j, tau) : normal_quantile(tau);
                return j.mu_R + j.sigma_R * z;
            },
            [&](const Lognormal& l) {
                auto p = ln_params(l, rn(measure));
                return std::exp(p.m + p.s * normal_quantile(tau));
            },
            [&](const Pareto& p) {
                double e = rn(measure) ? p.beta / (p.alpha + 1) : p.beta;
                return p.B * std::pow(1 - tau, -e);
            },
            [&](const Disaster& d) {
                return disaster_scale(d) * std::exp(d.leverage * dc_quantile(d, tau, rn(measure)));
            },
            [&](const RepAgent& r) {
                if (rn(measure)) return r.base_rn.quantile(tau);
                return physical_from_utility(r.base_rn, r.utility).quantile(tau);
            }},
        m);
}

double pareto_equity_premium(const Pareto& p) {
    if (!(p.beta < 1)) throw Error(Errc::MomentUndefined, "pareto mean requires beta < 1");
    return p.B / (1 - p.beta) - p.rf();
}

double pareto_sharpe(const Pareto& p) {
    if (!(p.beta < 0.5)) throw Error(Errc::MomentUndefined, "pareto variance requires beta < 1/2");
    double m1 = p.B / (1 - p.beta);
    double m2 = p.B * p.B / (1 - 2 * p.beta);
    return (m1 - p.rf()) / std::sqrt(m2 - m1 * m1);
}

ModelBounds model_local_and_hj(const ModelSpec& m, const std::vector<double>& taus) {
    ModelBounds out;
    double rf = model_rf(m);
    out.odc.taus = taus;
    out.local.kind = BoundKind::Local;
    out.local.rf = rf;
    out.local.taus = taus;

    std::function<double(double)> phi_of;
    std::optional<DistributionEstimate> phys;
    if (auto* d = std::get_if<Disaster>(&m)) {
        phi_of = [d](double t) { return disaster_dc_cdf(*d, dc_quantile(*d, t, true), false); };
    } else if (auto* r = std::get_if<RepAgent>(&m)) {
        phys = physical_from_utility(r->base_rn, r->utility);
        phi_of = [r, &phys](double t) { return phys->cdf_at(r->base_rn.quantile(t)); };
    } else if (auto* p = std::get_if<Pareto>(&m)) {
        phi_of = [p](double t) { return 1 - std::pow(1 - t, 1 / (p->alpha + 1)); };
    } else if (auto* l = std::get_if<Lognormal>(&m)) {
        phi_of = [l](double t) { return normal_cdf(normal_quantile(t) + l->rho * l->sigma_M * std::sqrt(l->lambda)); };
    } else {
        phi_of = [&m](double t) { return model_cdf(m, Measure::Physical, model_quantile(m, Measure::RiskNeutral, t)); };
    }
    for (double t : taus) {
        double f = phi_of(t);
        out.odc.phi.push_back(f);
        out.local.values.push_back(local_value(t, f, rf));
    }

    std::visit(overloaded{
                   [&](const JointNormal& j) {
                       out.equity_premium = j.mu_R - rf;
                       out.hj = std::abs(j.mu_R - rf) / (j.sigma_R * rf);
                       out.sdf_vol = j.sigma_M;
                   },
                   [&](const Lognormal& l) {
                       double er = std::exp(l.mu_R * l.lambda);
                       out.equity_premium = er - rf;
                       out.hj = std::abs(er - rf) / (er * std::sqrt(std::expm1(l.sigma_R * l.sigma_R * l.lambda)) * rf);
                       out.sdf_vol = std::sqrt(std::expm1(l.sigma_M * l.sigma_M * l.lambda)) / rf;
                   },
                   [&](const Pareto& p) {
                       out.equity_premium = pareto_equity_premium(p);
                       out.hj = std::abs(pareto_sharpe(p)) / rf;
                       out.sdf_vol = std::sqrt(p.A * p.A / (2 * p.alpha + 1) - std::pow(p.A / (p.alpha + 1), 2));
                   },
                   [&](const Disaster& d) {
                       double c = disaster_scale(d);
                       double m1 = c * disaster_mgf(d, d.leverage, false);
                       double m2 = c * c * disaster_mgf(d, 2 * d.leverage, false);
                       out.equity_premium = m1 - rf;
                       out.hj = std::abs(m1 - rf) / (std::sqrt(m2 - m1 * m1) * rf);
                       double em = disaster_mgf(d, -d.gamma, false);
                       out.sdf_vol = d.beta_discount * std::sqrt(disaster_mgf(d, -2 * d.gamma, false) - em * em);
                   },
                   [&](const RepAgent& r) {
                       double m1 = partial_expectation(*phys, [](double x) { return x; });
                       double m2 = partial_expectation(*phys, [](double x) { return x * x; });
                       out.equity_premium = m1 - rf;
                       double sd = std::sqrt(std::max(0.0, m2 - m1 * m1));
                       if (!(sd > 0)) throw Error(Errc::ZeroVariance, "degenerate physical distribution");
                       out.hj = std::abs(m1 - rf) / (sd * rf);
                       const auto& u = r.utility;
                       double ez = partial_expectation(r.base_rn, [&](double x) { return u.zeta(x, rf); });
                       double einv = partial_expectation(r.base_rn, [&](double x) { return 1 / u.zeta(x, rf); });
                       out.sdf_vol = std::sqrt(std::max(0.0, ez * einv - 1)) / rf;
                   }},
               m);
    return out;
}

HoeffdingResult hoeffding_check(const JointNormal& m, double x, int n_draws, std::uint64_t seed) {
    if (!(std::abs(m.rho) < 1)) throw Error(Errc::InvalidArgument, "|rho| must be below 1");
    if (n_draws < 2) throw Error(Errc::InvalidArgument, "need at least two draws");
    Rng rng(seed);
    const double n = n_draws, c = std::sqrt(1 - m.rho * m.rho);
    std::vector<double> ind(static_cast<std::size_t>(n_draws)), R(ind.size()), M(ind.size());
    double si = 0, sr = 0, sm = 0;
    for (std::size_t i = 0; i < ind.size(); ++i) {
        double z1 = rng.normal(), z2 = rng.normal();
        R[i] = m.mu_R + m.sigma_R * z1;
        M[i] = m.mu_M + m.sigma_M * (m.rho * z1 + c * z2);
        ind[i] = R[i] <= x ? 1.0 : 0.0;
        si += ind[i];
        sr += R[i];
        sm += M[i];
    }
    si /= n;
    sr /= n;
    sm /= n;
    double cim = 0, crm = 0, cim2 = 0;
    for (std::size_t i = 0; i < ind.size(); ++i) {
        double a = (ind[i] - si) * (M[i] - sm);
        cim += a;
        cim2 += a * a;
        crm += (R[i] - sr) * (M[i] - sm);
    }
    HoeffdingResult h;
    h.lhs = -cim / (n - 1);
    h.rhs = normal_pdf((x - m.mu_R) / m.sigma_R) / m.sigma_R * crm / (n - 1);
    double ma = cim / n;
    h.lhs_se = std::sqrt(std::max(0.0, cim2 / n - ma * ma) / n);
    return h;
}

double lognormal_efficiency(const Lognormal& m) {
    if (!(m.sigma_R > 0 && m.lambda > 0)) throw Error(Errc::InvalidArgument, "sigma_R and lambda must be positive");
    double v = m.sigma_R * m.sigma_R * m.lambda;
    return 0.5 * std::sqrt(2 * M_PI * v / std::expm1(v));
}

double lognormal_efficiency_scan(const Lognormal& m, const std::vector<double>& taus) {
    auto b = model_local_and_hj(m, taus);
    double best = std::numeric_limits<double>::infinity();
    for (double v : b.local.values)
        if (v > 0) best = std::min(best, b.hj / v);
    return best;
}

DistributionEstimate tilted_distribution(const DistributionEstimate& base, const std::function<double(double)>& g) {
    const auto& x = base.grid;
    const auto& c = base.cdf;
    const std::size_t n = x.size();
    if (n < 2) throw Error(Errc::InvalidArgument, "distribution grid too small");
    std::vector<double> cum(n);
    double acc = c[0] * g(x[0]);
    cum[0] = acc;
    for (std::size_t i = 1; i < n; ++i) {
        double dF = c[i] - c[i - 1];
        if (dF > 0) acc += dF * (g(x[i - 1]) + 4 * g(0.5 * (x[i - 1] + x[i])) + g(x[i])) / 6;
        cum[i] = acc;
    }
    double total = acc + (1 - c.back()) * g(x.back());
    if (!std::isfinite(total) || !(total > 0)) throw Error(Errc::DivergentTilt, "tilt normaliser is not finite and positive");
    DistributionEstimate d = base;
    d.measure = Measure::Physical;
    d.smile.reset();
    for (std::size_t i = 0; i < n; ++i) {
        d.cdf[i] = std::clamp(cum[i] / total, 0.0, 1.0);
        if (i < base.pdf.size()) d.pdf[i] = base.pdf[i] * g(x[i]) / total;
    }
    return d;
}

DistributionEstimate physical_from_utility(const DistributionEstimate& base_rn, const Utility& u) {
    double rf = base_rn.rf_gross;
    return tilted_distribution(base_rn, [&](double x) { return u.zeta(x, rf); });
}

double physical_cdf_crra(const DistributionEstimate& base_rn, double gamma, double x) {
    if (!(gamma >= 0)) throw Error(Errc::InvalidArgument, "gamma must be nonnegative");
    if (gamma == 0) return base_rn.cdf_at(x);
    Utility u{UtilityKind::Crra, gamma};
    return physical_from_utility(base_rn, u).cdf_at(x);
}

}  // namespace qb
