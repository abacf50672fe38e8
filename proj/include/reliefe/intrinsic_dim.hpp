#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "reliefe/sparse.hpp"

namespace reliefe {

struct DimOptions {
    /// Fraction of the largest ratios left out of the line fit.
    double trim_fraction = 0.1;
    /// Multiplies the fitted slope before rounding; compensates for the
    /// estimator's tendency to under-estimate.
    double dim_multiplier = 1.0;
    std::size_t threads = 1;
};

struct DimEstimate {
    std::size_t d = 1;
    double slope = 0.0;
    /// r₂ / r₁ for every sample that has two positive-distance neighbors,
    /// in sample order.
    std::vector<double> mu;
    /// EMP_n evaluated at each entry of mu.
    std::vector<double> empirical_cdf;
    /// Indices (into mu) of the points used by the least-squares fit.
    std::vector<std::size_t> fitted;
    /// Samples skipped because they lacked two positive-distance neighbors.
    std::size_t skipped = 0;
    /// The rounded slope was below 1 and has been raised to 1.
    bool clamped = false;
};

/// EMP_n(v_i) = #{j : v_j < v_i} / n for every entry.
std::vector<double> empirical_cdf(std::span<const double> values);

/// Two-nearest-neighbor latent dimension of the rows listed in `sample`.
/// Neighbors are searched among the sampled rows, ignoring rows at distance
/// zero; the slope of -log(1 - EMP(μ)) against log(μ) through the origin,
/// fitted on all but the largest trim_fraction of μ, is rounded to d.
DimEstimate estimate_dimension(const SparseMatrix& x, std::span<const std::size_t> sample,
                               const DimOptions& options = {});

}  // namespace reliefe
