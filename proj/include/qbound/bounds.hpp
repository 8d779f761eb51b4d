#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qbound/rnd.hpp"

namespace qb {

struct ODC {
    std::vector<double> taus;
    std::vector<double> phi;
};

enum class BoundKind { Local, Snow, LogEntropy, Liu };

const char* bound_kind_name(BoundKind k);
BoundKind parse_bound_kind(const std::string& s);

struct BoundCurve {
    std::vector<double> taus;
    std::vector<double> values;
    BoundKind kind = BoundKind::Local;
    double rf = 1;
};

ODC odc(const DistributionEstimate& physical_cdf, const QuantileCurve& rn_quantiles);

BoundCurve local_bound(const ODC& o, double rf, double epsilon = 0.01);

double hj_bound(double returns_mean, double returns_sd, double rf);

struct KernelCdf {
    DistributionEstimate dist;
    double bandwidth = 0;
};

// Integrated Epanechnikov kernel.
double epanechnikov_cdf(double u);
double epanechnikov_pdf(double u);

double silverman_bandwidth(const std::vector<double>& x);

// Leave-one-out integrated-squared-error CV over 40 log-spaced multiples in [0.1, 10] of Silverman's rule.
double cv_bandwidth(const std::vector<double>& x);

KernelCdf kernel_cdf(const std::vector<double>& returns, std::optional<double> bandwidth = std::nullopt,
                     std::size_t n_grid = 2001, int horizon_days = 0);

// Kernel CDF evaluated at a single point.
double kernel_cdf_at(const std::vector<double>& returns, double h, double x);

BoundCurve alt_bounds(const ODC& o, const QuantileCurve& rn_quantiles, double rf, BoundKind kind, double param);

struct DominanceOptions {
    int n_boot = 1000;
    std::uint64_t seed = 0;
    int block_length = 12;
    double epsilon = 0.01;
    int jobs = 1;
    std::optional<double> bandwidth;
};

struct DominanceResult {
    double tau_star = 0;
    double T_stat = 0;
    double p_value = 0;
    double local = 0;
    double hj = 0;
    double bandwidth = 0;
    int n_boot = 0;
    std::uint64_t seed = 0;
    int block_length = 0;
};

// Replicates reuse the full-sample bandwidth and the per-date risk-neutral fits at resampled dates.
DominanceResult dominance_test(const std::vector<double>& returns, const std::vector<DistributionEstimate>& rn_dists,
                               double tau_star, double rf, const DominanceOptions& opt);

}  // namespace qb
