#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "qbound/models.hpp"
#include "qbound/rnd.hpp"

namespace qb {

struct RiskAdjustment {
    std::optional<Date> date;
    int horizon_days = 0;
    double tau = 0;
    double lb = 0;
    double pdf_at_q = 0;
    double ra = 0;
    double q_tilde = 0;
    double q_hat = 0;
    bool lb_negative() const { return lb < 0; }
};

enum class ThetaSource { EmpiricalDefault, ModelDerived };

struct UtilityCoeffs {
    std::array<double, 3> theta{};
    ThetaSource source = ThetaSource::EmpiricalDefault;
    // theta = (1/Rf, -1/Rf^2, 1/Rf^3).
    static UtilityCoeffs empirical(double rf);
    // theta_k = zeta^(k)(Rf) / k!.
    static UtilityCoeffs from_utility(const Utility& u, double rf);
};

// Moments E~[(R-Rf)^k] and E~[(R-Rf)^k 1{R <= Q~tau}] for k = 1..3.
struct MomentSet {
    std::array<double, 3> full{};
    std::array<double, 3> trunc{};
};

MomentSet rn_moment_set(const DistributionEstimate& dist, double rf, double tau);

double lower_bound_from_moments(const MomentSet& m, double tau, const UtilityCoeffs& theta);

double feasible_lb(const DistributionEstimate& dist, double rf, double tau);
double feasible_lb(const DistributionEstimate& dist, double rf, double tau, const UtilityCoeffs& theta);

// RA = LB (Q~(tau+h) - Q~(tau-h)) / (2h).
double gateaux_ra(double lb, const DistributionEstimate& dist, double tau, double h = 0.001);

double quantile_predictor(double q_tilde, double ra);

RiskAdjustment risk_adjustment(const DistributionEstimate& dist, double tau, double h = 0.001);

// Fraction of adjacent tau pairs where predicted quantiles decrease.
double predictor_crossing_rate(const std::vector<RiskAdjustment>& by_tau);

// (tau - F(Q~tau)) / f~(Q~tau) computed from a known pair of cdfs.
double gateaux_first_order(const DistributionEstimate& rn, const DistributionEstimate& physical, double tau);

struct TauStar {
    double tau_star = 1;
    // Sign of Gamma' at the ends of (0, 0.5) when no root exists.
    std::string sign_profile;
};

TauStar validity_tau_star(const Utility& u, const DistributionEstimate& rn_dist);

// Gamma'(tau) = G(Q~tau) - E~[G(R)].
double validity_gamma_prime(const Utility& u, const DistributionEstimate& rn_dist, double tau);

double crash_prob_log_utility(const DistributionEstimate& dist, double rf, double tau);

}  // namespace qb

namespace qb {

// Closed-form moment set when log R ~ N(m, s^2).
MomentSet lognormal_moment_set(double m, double s, double rf, double tau);

}  // namespace qb
