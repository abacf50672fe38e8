#pragma once

#include <cstdint>
#include <optional>

#include "reliefe/sparse.hpp"

namespace reliefe {

struct SparsifyParams {
    /// Approximation level; estimated from the input when unset.
    std::optional<double> epsilon;
    double density_threshold = 0.15;
    std::uint64_t seed = 0;

    void validate() const;
};

/// ‖A‖∞ / (m + n) for the symmetric embedding A = [[0, B], [Bᵀ, 0]] of an
/// m×n matrix B, computed from the row and column absolute sums of B.
double estimate_epsilon(const SparseMatrix& b);

/// Probabilistic sparsification. With n = rows + cols and cutoff ε/√n,
/// entries above the cutoff are kept, the rest become sgn(b)·cutoff with
/// probability |b|/cutoff and zero otherwise. Each row draws from its own
/// stream so the result depends only on (input, seed).
SparseMatrix prms(const SparseMatrix& b, const SparsifyParams& params);

/// True when density(x) exceeds the threshold.
bool needs_sparsify(const SparseMatrix& x, const SparsifyParams& params);

/// prms(x) with the estimated ε when needs_sparsify(x), else a copy of x.
SparseMatrix maybe_sparsify(const SparseMatrix& x, const SparsifyParams& params);

}  // namespace reliefe
