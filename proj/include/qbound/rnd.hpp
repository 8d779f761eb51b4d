#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qbound/market_data.hpp"

namespace qb {

enum class Measure { Physical, RiskNeutral };

// Implied-volatility smile in log forward moneyness y = ln(K / F).
struct Smile {
    std::vector<double> y;
    std::vector<double> vol;
    double years = 0;
    double rf_gross = 1;
    double fwd_moneyness = 1;  // F / S

    double vol_at(double y) const;  // monotone cubic inside, flat outside
};

// Distribution on a grid of gross returns x = K / S. The cdf is linear between grid points,
// with the mass below the grid placed at grid.front() and the mass above at grid.back().
struct DistributionEstimate {
    std::vector<double> grid;
    std::vector<double> cdf;
    std::vector<double> pdf;
    Measure measure = Measure::RiskNeutral;
    std::optional<Date> date;
    int horizon_days = 0;
    double rf_gross = 1;
    std::optional<Smile> smile;

    double cdf_at(double x) const;
    double pdf_at(double x) const;
    // Generalised inverse inf{x : F(x) >= tau}. Sets *truncated when tau falls outside the grid mass.
    double quantile(double tau, bool* truncated = nullptr) const;
    // Empty when all invariants hold.
    std::vector<std::string> invariant_violations() const;
};

enum class CurveKind { RnQuantile, PhysicalQuantile, Bound, Odc, RiskAdjustment };

struct QuantileCurve {
    std::vector<double> taus;
    std::vector<double> values;
    CurveKind kind = CurveKind::RnQuantile;
    int horizon_days = 0;
    std::vector<bool> truncated;
};

struct GridSpec {
    double lo = 0.3;
    double hi = 2.0;
    std::size_t n = 2001;
};

DistributionEstimate fit_rn_distribution(const OptionChain& chain, const GridSpec& grid = {});

// Reprices puts from a smile and applies Breeden-Litzenberger on the grid.
DistributionEstimate fit_from_smile(const Smile& smile, const GridSpec& grid, int horizon_days,
                                    std::optional<Date> date = std::nullopt);

DistributionEstimate interpolate_maturity(const DistributionEstimate& a, const DistributionEstimate& b,
                                          int target_days, const GridSpec& grid = {});

QuantileCurve rn_quantile_curve(const DistributionEstimate& dist, const std::vector<double>& taus);

DistributionEstimate unconditional_rn_cdf(const std::vector<DistributionEstimate>& dists);

// E[g(R) 1{F(R) <= tau_cap}] under dist, by cell-wise Simpson on the linear-cdf representation.
double partial_expectation(const DistributionEstimate& dist, const std::function<double(double)>& g,
                           double tau_cap = 1.0);

double rn_moment(const DistributionEstimate& dist, int n, double rf);
double rn_truncated_moment(const DistributionEstimate& dist, int n, double rf, double tau_cap);

// Builds a distribution from closed-form cdf/pdf on a uniform grid.
DistributionEstimate distribution_from_functions(const std::function<double(double)>& cdf,
                                                 const std::function<double(double)>& pdf, const GridSpec& grid,
                                                 Measure measure, int horizon_days, double rf_gross);

// Lognormal with log R ~ N(m, s^2).
DistributionEstimate lognormal_distribution(double m, double s, const GridSpec& grid, Measure measure,
                                            int horizon_days, double rf_gross);

}  // namespace qb
