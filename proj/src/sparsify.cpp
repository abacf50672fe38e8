#include "reliefe/sparsify.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "reliefe/error.hpp"
#include "reliefe/rng.hpp"

namespace reliefe {

void SparsifyParams::validate() const {
    if (epsilon && !(*epsilon > 0.0 && std::isfinite(*epsilon)))
        throw Error(ErrorKind::InvalidConfig, "epsilon must be positive");
    if (!(density_threshold >= 0.0 && density_threshold <= 1.0))
        throw Error(ErrorKind::InvalidConfig, "density threshold must lie in [0, 1]");
}

double estimate_epsilon(const SparseMatrix& b) {
    std::vector<double> col_sums(b.n_cols(), 0.0);
    double max_abs_sum = 0.0;
    for (std::size_t i = 0; i < b.n_rows(); ++i) {
        const RowView r = b.row(i);
        double row_sum = 0.0;
        for (std::size_t p = 0; p < r.nnz(); ++p) {
            row_sum += std::abs(r.vals[p]);
            col_sums[r.cols[p]] += std::abs(r.vals[p]);
        }
        max_abs_sum = std::max(max_abs_sum, row_sum);
    }
    for (double c : col_sums) max_abs_sum = std::max(max_abs_sum, c);
    if (max_abs_sum == 0.0) throw Error(ErrorKind::DegenerateInput, "cannot estimate epsilon of an all-zero matrix");
    return max_abs_sum / static_cast<double>(b.n_rows() + b.n_cols());
}

SparseMatrix prms(const SparseMatrix& b, const SparsifyParams& params) {
    params.validate();
    const double eps = params.epsilon ? *params.epsilon : estimate_epsilon(b);
    const double order = static_cast<double>(b.n_rows() + b.n_cols());
    const double cutoff = eps / std::sqrt(order);

    SparseBuilder builder(b.n_cols());
    builder.reserve(b.n_rows(), b.nnz());
    for (std::size_t i = 0; i < b.n_rows(); ++i) {
        Rng rng = make_rng(params.seed, stream::sparsify, i);
        const RowView r = b.row(i);
        for (std::size_t p = 0; p < r.nnz(); ++p) {
            const double v = r.vals[p];
            if (std::abs(v) > cutoff) {
                builder.push(r.cols[p], v);
            } else if (uniform01(rng) < std::abs(v) / cutoff) {
                builder.push(r.cols[p], std::copysign(cutoff, v));
            }
        }
        builder.finish_row();
    }
    return std::move(builder).build();
}

bool needs_sparsify(const SparseMatrix& x, const SparsifyParams& params) {
    params.validate();
    return density(x) > params.density_threshold;
}

SparseMatrix maybe_sparsify(const SparseMatrix& x, const SparsifyParams& params) {
    if (!needs_sparsify(x, params)) return x;
    return prms(x, params);
}

}  // namespace reliefe
