#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace qb {

double normal_pdf(double z);
double normal_cdf(double z);
double normal_quantile(double p);

// Upper tail of the chi-square distribution with k degrees of freedom.
double chi2_sf(double x, double k);

std::vector<double> linspace(double a, double b, std::size_t n);
std::vector<double> logspace(double a, double b, std::size_t n);

// Default quantile-level grid {0.001, ..., 0.999}.
std::vector<double> default_tau_grid();

// Piecewise-linear interpolation; constant beyond the end points.
double interp_linear(const std::vector<double>& x, const std::vector<double>& y, double xq);

// Pool-adjacent-violators: least-squares nondecreasing fit.
std::vector<double> pava(const std::vector<double>& y);

// Fritsch-Carlson monotone cubic Hermite interpolant, flat outside [x0, xn].
class MonotoneCubic {
public:
    MonotoneCubic() = default;
    MonotoneCubic(std::vector<double> x, std::vector<double> y);
    double operator()(double xq) const;
    const std::vector<double>& x() const { return x_; }
    const std::vector<double>& y() const { return y_; }

private:
    std::vector<double> x_, y_, d_;
};

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol = 1e-10, int max_depth = 40);

// Bisection for a sign change of f on [lo, hi].
double bisect(const std::function<double(double)>& f, double lo, double hi,
              double xtol = 1e-12, int max_iter = 200);

double mean(const std::vector<double>& v);
double sample_sd(const std::vector<double>& v);

// In-sample tau-quantile y_(ceil(n*tau)), a minimiser of the pinball loss over constants.
double empirical_quantile(std::vector<double> v, double tau);

double pinball(double u, double tau);

// Seed for replicate stream `id` derived from a master seed.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t id);

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}
    double uniform();                        // (0, 1)
    std::size_t index(std::size_t n);        // {0, ..., n-1}
    double normal() { return norm_(eng_); }
    int poisson(double mean);
    std::mt19937_64& engine() { return eng_; }

private:
    std::mt19937_64 eng_;
    std::normal_distribution<double> norm_{0.0, 1.0};
};

// Runs f(i) for i in [0, n) on up to `jobs` threads. Each index is handled exactly once.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& f);

}  // namespace qb
