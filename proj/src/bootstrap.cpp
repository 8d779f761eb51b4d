#include "qbound/bootstrap.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "qbound/error.hpp"
#include "qbound/numerics.hpp"

namespace qb {

void ResamplePlan::validate(std::size_t n) const {
    if (block_length < 1) throw Error(Errc::InvalidArgument, "block_length must be at least 1");
    if (static_cast<std::size_t>(block_length) > n) throw Error(Errc::InvalidArgument, "block_length exceeds sample size");
    if (n_replicates < 1) throw Error(Errc::InvalidArgument, "n_replicates must be positive");
    if (taper < 0 || taper > 1) throw Error(Errc::InvalidArgument, "taper width must lie in [0,1]");
}

const char* scheme_name(Scheme s) {
    switch (s) {
        case Scheme::MovingBlock: return "moving_block";
        case Scheme::Stationary: return "stationary";
        case Scheme::Iid: return "iid";
    }
    return "?";
}

Scheme parse_scheme(const std::string& s) {
    if (s == "moving_block") return Scheme::MovingBlock;
    if (s == "stationary") return Scheme::Stationary;
    if (s == "iid") return Scheme::Iid;
    throw Error(Errc::InvalidArgument, "unknown bootstrap scheme '" + s + "'");
}

namespace {

// Calls emit(index, position_in_block, block_len) for every draw of the replicate.
template <class F>
void walk(const ResamplePlan& plan, std::size_t n, int replicate_id, F emit) {
    Rng rng(stream_seed(plan.seed, static_cast<std::uint64_t>(replicate_id)));
    switch (plan.scheme) {
        case Scheme::Iid:
            for (std::size_t i = 0; i < n; ++i) emit(rng.index(n), 0, 1);
            break;
        case Scheme::MovingBlock: {
            const std::size_t b = static_cast<std::size_t>(plan.block_length);
            std::size_t filled = 0;
            while (filled < n) {
                std::size_t start = rng.index(n);
                for (std::size_t j = 0; j < b && filled < n; ++j, ++filled) emit((start + j) % n, j, b);
            }
            break;
        }
        case Scheme::Stationary: {
            const double p = 1.0 / plan.block_length;
            std::size_t cur = rng.index(n);
            for (std::size_t i = 0; i < n; ++i) {
                if (i > 0) cur = rng.uniform() < p ? rng.index(n) : (cur + 1) % n;
                emit(cur, 0, 1);
            }
            break;
        }
    }
}

}  // namespace

std::vector<std::size_t> resample_indices(const ResamplePlan& plan, std::size_t n, int replicate_id) {
    plan.validate(n);
    std::vector<std::size_t> idx;
    idx.reserve(n);
    walk(plan, n, replicate_id, [&](std::size_t i, std::size_t, std::size_t) { idx.push_back(i); });
    return idx;
}

std::vector<double> resample_weights(const ResamplePlan& plan, std::size_t n, int replicate_id) {
    plan.validate(n);
    std::vector<double> w(n, 1.0);
    if (plan.taper <= 0 || plan.scheme != Scheme::MovingBlock || plan.block_length < 2) return w;
    const std::size_t b = static_cast<std::size_t>(plan.block_length);
    std::size_t ramp = static_cast<std::size_t>(std::ceil(0.5 * plan.taper * static_cast<double>(b)));
    if (ramp < 1) ramp = 1;
    std::vector<double> shape(b);
    double sum = 0;
    for (std::size_t j = 0; j < b; ++j) {
        std::size_t e = std::min(j, b - 1 - j);
        shape[j] = e < ramp ? 0.5 * (1.0 - std::cos(M_PI * (static_cast<double>(e) + 0.5) / static_cast<double>(ramp)))
                            : 1.0;
        sum += shape[j];
    }
    for (auto& s : shape) s *= static_cast<double>(b) / sum;
    std::size_t k = 0;
    walk(plan, n, replicate_id, [&](std::size_t, std::size_t j, std::size_t) { w[k++] = shape[j]; });
    return w;
}

int default_block_length(int horizon_days) { return std::max(1, 5 * horizon_days); }

BootCov qr_boot_cov(const QRDesign& design, const ResamplePlan& plan, int jobs) {
    design.validate();
    const std::size_t n = static_cast<std::size_t>(design.y.size());
    plan.validate(n);
    qr_fit(design);  // the full-sample fit must succeed

    const int B = plan.n_replicates;
    const int p = design.p();
    std::vector<Eigen::VectorXd> betas(static_cast<std::size_t>(B));
    std::vector<char> ok(static_cast<std::size_t>(B), 0);
    parallel_for(static_cast<std::size_t>(B), jobs, [&](std::size_t r) {
        auto idx = resample_indices(plan, n, static_cast<int>(r));
        QRDesign d;
        d.tau = design.tau;
        d.include_intercept = design.include_intercept;
        d.y.resize(static_cast<Eigen::Index>(n));
        d.X.resize(static_cast<Eigen::Index>(n), design.X.cols());
        for (std::size_t i = 0; i < n; ++i) {
            d.y[static_cast<Eigen::Index>(i)] = design.y[static_cast<Eigen::Index>(idx[i])];
            if (design.X.cols() > 0) d.X.row(static_cast<Eigen::Index>(i)) = design.X.row(static_cast<Eigen::Index>(idx[i]));
        }
        if (plan.taper > 0) {
            auto w = resample_weights(plan, n, static_cast<int>(r));
            d.weights = Eigen::Map<Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(n));
            if (design.weights.size() > 0)
                for (std::size_t i = 0; i < n; ++i)
                    d.weights[static_cast<Eigen::Index>(i)] *= design.weights[static_cast<Eigen::Index>(idx[i])];
        } else if (design.weights.size() > 0) {
            d.weights.resize(static_cast<Eigen::Index>(n));
            for (std::size_t i = 0; i < n; ++i)
                d.weights[static_cast<Eigen::Index>(i)] = design.weights[static_cast<Eigen::Index>(idx[i])];
        }
        try {
            betas[r] = qr_fit(d).beta;
            ok[r] = 1;
        } catch (const Error&) {
            ok[r] = 0;
        }
    });

    BootCov out;
    Eigen::VectorXd m = Eigen::VectorXd::Zero(p);
    for (int r = 0; r < B; ++r)
        if (ok[static_cast<std::size_t>(r)]) {
            m += betas[static_cast<std::size_t>(r)];
            ++out.n_ok;
        }
    out.n_failed = B - out.n_ok;
    if (out.n_failed * 20 > B)
        throw Error(Errc::ReplicateFailure, std::to_string(out.n_failed) + " of " + std::to_string(B) +
                                                " bootstrap refits failed");
    if (out.n_ok < 2) throw Error(Errc::ReplicateFailure, "fewer than two successful replicates");
    m /= out.n_ok;
    out.cov = Eigen::MatrixXd::Zero(p, p);
    for (int r = 0; r < B; ++r)
        if (ok[static_cast<std::size_t>(r)]) {
            Eigen::VectorXd dlt = betas[static_cast<std::size_t>(r)] - m;
            out.cov += dlt * dlt.transpose();
        }
    out.cov /= (out.n_ok - 1);
    return out;
}

}  // namespace qb
