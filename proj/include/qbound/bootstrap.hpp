#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qbound/qr.hpp"

namespace qb {

enum class Scheme { MovingBlock, Stationary, Iid };

struct ResamplePlan {
    Scheme scheme = Scheme::MovingBlock;
    int block_length = 1;  // expected length for the stationary scheme
    int n_replicates = 1000;
    std::uint64_t seed = 0;
    double taper = 0.0;  // cosine half-window width as a fraction of the block; 0 disables tapering

    void validate(std::size_t n) const;
};

const char* scheme_name(Scheme s);
Scheme parse_scheme(const std::string& s);

std::vector<std::size_t> resample_indices(const ResamplePlan& plan, std::size_t n, int replicate_id);

// Taper weights aligned with resample_indices (all ones without tapering), normalised to mean one per block.
std::vector<double> resample_weights(const ResamplePlan& plan, std::size_t n, int replicate_id);

// Block length convention for overlapping designs: five times the horizon.
int default_block_length(int horizon_days);

struct BootCov {
    Eigen::MatrixXd cov;
    int n_ok = 0;
    int n_failed = 0;
};

BootCov qr_boot_cov(const QRDesign& design, const ResamplePlan& plan, int jobs = 1);

}  // namespace qb
