#include "qbound/simulate.hpp"

#include <cmath>

#include "qbound/black_scholes.hpp"
#include "qbound/error.hpp"
#include "qbound/numerics.hpp"

namespace qb {

const char* dgp_name(DgpKind k) {
    switch (k) {
        case DgpKind::BsTimeVarying: return "bs_timevarying";
        case DgpKind::BsFixed: return "bs_fixed";
        case DgpKind::Disaster: return "disaster";
        case DgpKind::Pareto: return "pareto";
    }
    return "?";
}

DgpKind parse_dgp(const std::string& s) {
    if (s == "bs_timevarying") return DgpKind::BsTimeVarying;
    if (s == "bs_fixed") return DgpKind::BsFixed;
    if (s == "disaster") return DgpKind::Disaster;
    if (s == "pareto") return DgpKind::Pareto;
    throw Error(Errc::InvalidArgument, "unknown dgp '" + s + "'");
}

double BsPeriod::rf() const { return std::exp(r * years); }
double BsPeriod::log_sd() const { return sigma * std::sqrt(years); }
double BsPeriod::log_mean(bool risk_neutral) const { return ((risk_neutral ? r : mu) - 0.5 * sigma * sigma) * years; }

double BsPeriod::quantile(double tau, bool risk_neutral) const {
    return std::exp(log_mean(risk_neutral) + log_sd() * normal_quantile(tau));
}

double BsPeriod::pdf(double x, bool risk_neutral) const {
    if (!(x > 0)) return 0.0;
    double s = log_sd();
    return normal_pdf((std::log(x) - log_mean(risk_neutral)) / s) / (x * s);
}

Simulation simulate_dgp(DgpKind kind, const DgpParams& prm, int n_periods, std::uint64_t seed) {
    if (n_periods < 1) throw Error(Errc::InvalidArgument, "n_periods must be positive");
    Simulation sim;
    sim.kind = kind;
    Rng rng(seed);
    const std::size_t n = static_cast<std::size_t>(n_periods);
    sim.returns.reserve(n);
    const double years = prm.horizon_days / 365.0;
    switch (kind) {
        case DgpKind::BsTimeVarying:
        case DgpKind::BsFixed:
            sim.periods.reserve(n);
            for (std::size_t t = 0; t < n; ++t) {
                BsPeriod p = prm.fixed;
                p.years = years;
                if (kind == DgpKind::BsTimeVarying) {
                    p.sigma = prm.sigma_lo + (prm.sigma_hi - prm.sigma_lo) * rng.uniform();
                    p.mu = prm.mu_lo + (prm.mu_hi - prm.mu_lo) * rng.uniform();
                    p.r = prm.r_lo + (prm.r_hi - prm.r_lo) * rng.uniform();
                }
                sim.returns.push_back(std::exp(p.log_mean(false) + p.log_sd() * rng.normal()));
                sim.periods.push_back(p);
            }
            break;
        case DgpKind::Disaster: {
            const Disaster& d = prm.disaster;
            double c = disaster_scale(d);
            for (std::size_t t = 0; t < n; ++t) {
                double dc = d.mu + d.sigma * rng.normal();
                int j = rng.poisson(d.kappa);
                if (j > 0) dc += j * d.theta + std::sqrt(static_cast<double>(j)) * d.nu * rng.normal();
                sim.returns.push_back(c * std::exp(d.leverage * dc));
            }
            sim.model = d;
            break;
        }
        case DgpKind::Pareto: {
            const Pareto& p = prm.pareto;
            for (std::size_t t = 0; t < n; ++t) sim.returns.push_back(p.B * std::pow(rng.uniform(), -p.beta));
            sim.model = p;
            break;
        }
    }
    return sim;
}

DistributionEstimate bs_period_distribution(const BsPeriod& p, const GridSpec& grid, int horizon_days) {
    return lognormal_distribution(p.log_mean(true), p.log_sd(), grid, Measure::RiskNeutral, horizon_days, p.rf());
}

OptionChain synthetic_chain(const BsPeriod& law, Date date, int maturity_days, int n_strikes, double k_lo,
                            double k_hi) {
    if (n_strikes < 2) throw Error(Errc::InvalidArgument, "need at least two strikes");
    OptionChain c;
    c.observation_date = date;
    c.expiry_date = date + maturity_days;
    c.maturity_days = maturity_days;
    c.underlying = 1.0;
    const double T = maturity_days / 365.0;
    c.risk_free_gross = std::exp(law.r * T);
    c.forward = c.risk_free_gross;
    const double D = 1.0 / c.risk_free_gross;
    for (double k : linspace(k_lo, k_hi, static_cast<std::size_t>(n_strikes))) {
        ChainQuote q;
        q.strike = k;
        q.put_mid = bs_put(c.forward, k, T, law.sigma, D);
        q.spread = 0;
        q.from_call = k >= c.forward;
        c.quotes.push_back(q);
    }
    return c;
}

}  // namespace qb
