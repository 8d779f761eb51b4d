#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qbound/market_data.hpp"
#include "qbound/models.hpp"
#include "qbound/rnd.hpp"

namespace qb {

enum class DgpKind { BsTimeVarying, BsFixed, Disaster, Pareto };

const char* dgp_name(DgpKind k);
DgpKind parse_dgp(const std::string& s);

// One period of the Black-Scholes DGP; mu, sigma, r are annual and years is the horizon.
struct BsPeriod {
    double mu = 0.08, sigma = 0.2, r = 0.02, years = 30.0 / 365.0;
    double rf() const;
    double log_sd() const;
    double log_mean(bool risk_neutral) const;
    double quantile(double tau, bool risk_neutral) const;
    double pdf(double x, bool risk_neutral) const;
};

struct DgpParams {
    int horizon_days = 30;
    double sigma_lo = 0.05, sigma_hi = 0.35;
    double mu_lo = -0.02, mu_hi = 0.2;
    double r_lo = 0.0, r_hi = 0.03;
    BsPeriod fixed;
    Disaster disaster;
    Pareto pareto;
};

struct Simulation {
    DgpKind kind = DgpKind::BsTimeVarying;
    std::vector<double> returns;
    // Per-period laws for the Black-Scholes kinds.
    std::vector<BsPeriod> periods;
    // Constant law for the disaster and Pareto kinds.
    std::optional<ModelSpec> model;
};

Simulation simulate_dgp(DgpKind kind, const DgpParams& params, int n_periods, std::uint64_t seed);

// Exact risk-neutral distribution of one period on a grid.
DistributionEstimate bs_period_distribution(const BsPeriod& p, const GridSpec& grid = {}, int horizon_days = 0);

// Black-Scholes put chain with S = 1 and strikes evenly spaced in moneyness.
OptionChain synthetic_chain(const BsPeriod& law, Date date, int maturity_days, int n_strikes, double k_lo = 0.4,
                            double k_hi = 1.8);

}  // namespace qb
