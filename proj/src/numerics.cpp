#include "qbound/numerics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "qbound/error.hpp"

namespace qb {

double normal_pdf(double z) { return 0.3989422804014327 * std::exp(-0.5 * z * z); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw Error(Errc::InvalidArgument, "normal_quantile needs p in (0,1)");
    return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p);
}

double chi2_sf(double x, double k) {
    if (x <= 0.0) return 1.0;
    return boost::math::gamma_q(0.5 * k, 0.5 * x);
}

std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> v(n);
    if (n == 1) {
        v[0] = a;
        return v;
    }
    for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    v.back() = b;
    return v;
}

std::vector<double> logspace(double a, double b, std::size_t n) {
    auto v = linspace(std::log(a), std::log(b), n);
    for (auto& x : v) x = std::exp(x);
    return v;
}

std::vector<double> default_tau_grid() {
    std::vector<double> t(999);
    for (int i = 0; i < 999; ++i) t[i] = (i + 1) / 1000.0;
    return t;
}

double interp_linear(const std::vector<double>& x, const std::vector<double>& y, double xq) {
    if (xq <= x.front()) return y.front();
    if (xq >= x.back()) return y.back();
    auto it = std::upper_bound(x.begin(), x.end(), xq);
    std::size_t j = static_cast<std::size_t>(it - x.begin());
    std::size_t i = j - 1;
    double w = (xq - x[i]) / (x[j] - x[i]);
    return y[i] + w * (y[j] - y[i]);
}

std::vector<double> pava(const std::vector<double>& y) {
    std::vector<double> val;
    std::vector<std::size_t> cnt;
    val.reserve(y.size());
    cnt.reserve(y.size());
    for (double v : y) {
        val.push_back(v);
        cnt.push_back(1);
        while (val.size() > 1 && val[val.size() - 2] > val.back()) {
            std::size_t c = cnt.back() + cnt[cnt.size() - 2];
            double m = (val.back() * cnt.back() + val[val.size() - 2] * cnt[cnt.size() - 2]) / c;
            val.pop_back();
            cnt.pop_back();
            val.back() = m;
            cnt.back() = c;
        }
    }
    std::vector<double> out;
    out.reserve(y.size());
    for (std::size_t b = 0; b < val.size(); ++b) out.insert(out.end(), cnt[b], val[b]);
    return out;
}

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n != y_.size() || n == 0) throw Error(Errc::InvalidArgument, "MonotoneCubic: size mismatch");
    d_.assign(n, 0.0);
    if (n == 1) return;
    std::vector<double> h(n - 1), delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = x_[i + 1] - x_[i];
        if (!(h[i] > 0)) throw Error(Errc::InvalidArgument, "MonotoneCubic: abscissae must increase");
        delta[i] = (y_[i + 1] - y_[i]) / h[i];
    }
    if (n == 2) {
        d_[0] = d_[1] = delta[0];
        return;
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (delta[i - 1] * delta[i] <= 0) {
            d_[i] = 0;
        } else {
            double w1 = 2 * h[i] + h[i - 1], w2 = h[i] + 2 * h[i - 1];
            d_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    auto end_slope = [](double h0, double h1, double d0, double d1) {
        double d = ((2 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (d * d0 <= 0) return 0.0;
        if (d0 * d1 <= 0 && std::abs(d) > std::abs(3 * d0)) return 3 * d0;
        return d;
    };
    d_[0] = end_slope(h[0], h[1], delta[0], delta[1]);
    d_[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
}

double MonotoneCubic::operator()(double xq) const {
    if (xq <= x_.front()) return y_.front();
    if (xq >= x_.back()) return y_.back();
    auto it = std::upper_bound(x_.begin(), x_.end(), xq);
    std::size_t j = static_cast<std::size_t>(it - x_.begin());
    std::size_t i = j - 1;
    double h = x_[j] - x_[i];
    double t = (xq - x_[i]) / h;
    double t2 = t * t, t3 = t2 * t;
    double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
    double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    return h00 * y_[i] + h10 * h * d_[i] + h01 * y_[j] + h11 * h * d_[j];
}

namespace {
double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa, double fm,
                   double fb, double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6 * (fa + 4 * flm + fm);
    double right = (b - m) / 6 * (fm + 4 * frm + fb);
    double diff = left + right - whole;
    if (depth <= 0 || std::abs(diff) <= 15 * tol) return left + right + diff / 15;
    return simpson_rec(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}
}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double abs_tol,
                        int max_depth) {
    if (a == b) return 0.0;
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = (b - a) / 6 * (fa + 4 * fm + fb);
    return simpson_rec(f, a, b, fa, fm, fb, whole, abs_tol, max_depth);
}

double bisect(const std::function<double(double)>& f, double lo, double hi, double xtol, int max_iter) {
    double flo = f(lo), fhi = f(hi);
    if (flo == 0) return lo;
    if (fhi == 0) return hi;
    if ((flo > 0) == (fhi > 0)) throw Error(Errc::NoRoot, "bisect: no sign change on bracket");
    for (int it = 0; it < max_iter && hi - lo > xtol; ++it) {
        double mid = 0.5 * (lo + hi);
        double fm = f(mid);
        if (fm == 0) return mid;
        if ((fm > 0) == (flo > 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double mean(const std::vector<double>& v) {
    if (v.empty()) return std::nan("");
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_sd(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    double m = mean(v), s = 0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

double empirical_quantile(std::vector<double> v, double tau) {
    if (v.empty()) throw Error(Errc::InsufficientData, "empirical_quantile of empty sample");
    std::size_t n = v.size();
    std::size_t k = static_cast<std::size_t>(std::ceil(tau * static_cast<double>(n) - 1e-12));
    if (k < 1) k = 1;
    if (k > n) k = n;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k - 1), v.end());
    return v[k - 1];
}

double pinball(double u, double tau) { return u * (tau - (u < 0 ? 1.0 : 0.0)); }

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t id) {
    auto mix = [](std::uint64_t z) {
        z += 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    };
    return mix(mix(seed) ^ (id * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL));
}

double Rng::uniform() {
    for (;;) {
        double u = static_cast<double>(eng_() >> 11) * 0x1.0p-53;
        if (u > 0.0) return u;
    }
}

std::size_t Rng::index(std::size_t n) {
    std::size_t i = static_cast<std::size_t>(uniform() * static_cast<double>(n));
    return i < n ? i : n - 1;
}

int Rng::poisson(double mean) {
    std::poisson_distribution<int> d(mean);
    return d(eng_);
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& f) {
    if (jobs <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::size_t nt = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (std::size_t t = 0; t < nt; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    f(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(err_mu);
                    if (!err) err = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace qb
