#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "qbound/bounds.hpp"
#include "qbound/rnd.hpp"

namespace qb {

// R ~ N(mu_R, sigma_R^2), M ~ N(mu_M, sigma_M^2), corr(R, M) = rho. Pricing requires E[MR] = 1.
struct JointNormal {
    double mu_R = 1.05, sigma_R = 0.16, mu_M = 1.0, sigma_M = 0.4, rho = -0.5;
    double rf() const { return 1.0 / mu_M; }
    // Sets mu_R so that E[MR] = 1.
    static JointNormal priced(double sigma_R, double rf, double sigma_M, double rho);
};

// log R and log M jointly normal over time scale lambda; mu_R - r_f = -rho sigma_R sigma_M.
struct Lognormal {
    double mu_R = 0.08, sigma_R = 0.16, r_f = 0.02, sigma_M = 0.375, rho = -1.0, lambda = 1.0;
    static Lognormal priced(double sigma_R, double r_f, double sigma_M, double rho, double lambda);
};

// M = A U^alpha, R = B U^-beta with U ~ Uniform(0, 1).
struct Pareto {
    double A = 1.19, alpha = 0.19, B = 0.72, beta = 0.33;
    double rf() const { return (alpha + 1) / A; }
    // Exact parameters reproducing equity premium ep and gross rate rf for tail index beta.
    static Pareto calibrate(double beta, double ep, double rf);
    // Keeps A and alpha and rederives B from AB = alpha - beta + 1.
    static Pareto with_beta(double A, double alpha, double beta);
};

// Power-utility representative agent, consumption growth with Poisson-normal jumps, R = c exp(lambda dc).
struct Disaster {
    double beta_discount = 0.97, gamma = 5.19, mu = 0.025, sigma = 0.02, theta = -0.3, nu = 0.15, kappa = 0.01;
    double leverage = 3.0;
    int j_max = 20;
    // Also shift the diffusion mean by -gamma sigma^2 under the risk-neutral measure.
    bool tilt_diffusion = false;
};

enum class UtilityKind { Log, Crra, Exponential };

struct Utility {
    UtilityKind kind = UtilityKind::Log;
    double gamma = 1.0;
    // zeta(x) relative to zeta(rf); the physical density is proportional to zeta times the risk-neutral density.
    double zeta(double x, double rf) const;
    // Fourth derivative of zeta.
    double zeta4(double x, double rf) const;
    std::string name() const;
};

struct RepAgent {
    Utility utility;
    DistributionEstimate base_rn;
};

using ModelSpec = std::variant<JointNormal, Lognormal, Pareto, Disaster, RepAgent>;

std::string model_name(const ModelSpec& m);

double model_cdf(const ModelSpec& m, Measure measure, double x);
double model_quantile(const ModelSpec& m, Measure measure, double tau);
double model_rf(const ModelSpec& m);

struct ModelBounds {
    ODC odc;
    BoundCurve local;
    double hj = 0;
    double sdf_vol = 0;  // sigma(M)
    double equity_premium = 0;
};

ModelBounds model_local_and_hj(const ModelSpec& m, const std::vector<double>& taus);

// Pareto Sharpe ratio (E R - Rf) / sigma(R).
double pareto_sharpe(const Pareto& p);
double pareto_equity_premium(const Pareto& p);

// Disaster model pieces.
double disaster_mgf(const Disaster& d, double u, bool risk_neutral);
double disaster_scale(const Disaster& d);
double disaster_rf(const Disaster& d);
// CDF of consumption growth dc.
double disaster_dc_cdf(const Disaster& d, double x, bool risk_neutral);

struct HoeffdingResult {
    double lhs = 0, rhs = 0, lhs_se = 0;
};
HoeffdingResult hoeffding_check(const JointNormal& m, double x, int n_draws, std::uint64_t seed);

double lognormal_efficiency(const Lognormal& m);
// min over the grid of HJ / local for the exact lognormal curves.
double lognormal_efficiency_scan(const Lognormal& m, const std::vector<double>& taus);

// Physical distribution with density proportional to g(x) times the base risk-neutral density.
DistributionEstimate tilted_distribution(const DistributionEstimate& base, const std::function<double(double)>& g);
DistributionEstimate physical_from_utility(const DistributionEstimate& base_rn, const Utility& u);
double physical_cdf_crra(const DistributionEstimate& base_rn, double gamma, double x);

}  // namespace qb
