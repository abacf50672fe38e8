#include "reliefe/intrinsic_dim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "reliefe/error.hpp"
#include "reliefe/parallel.hpp"

namespace reliefe {

std::vector<double> empirical_cdf(std::span<const double> values) {
    const std::vector<std::size_t> order = argsort_ascending(values);
    std::vector<double> out(values.size());
    const double n = static_cast<double>(values.size());
    std::size_t first_of_run = 0;
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        if (rank > 0 && values[order[rank]] != values[order[rank - 1]]) first_of_run = rank;
        out[order[rank]] = static_cast<double>(first_of_run) / n;
    }
    return out;
}

DimEstimate estimate_dimension(const SparseMatrix& x, std::span<const std::size_t> sample,
                               const DimOptions& options) {
    if (sample.size() < 3) throw Error(ErrorKind::InvalidShape, "dimension estimate needs at least 3 samples");
    if (!(options.trim_fraction >= 0.0 && options.trim_fraction < 1.0))
        throw Error(ErrorKind::InvalidConfig, "trim fraction must lie in [0, 1)");
    for (std::size_t i : sample)
        if (i >= x.n_rows()) throw Error(ErrorKind::InvalidShape, "sample index out of range");

    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> r1(sample.size(), inf), r2(sample.size(), inf);
    parallel_for(sample.size(), options.threads, [&](std::size_t b, std::size_t e, std::size_t) {
        for (std::size_t s = b; s < e; ++s) {
            const RowView ri = x.row(sample[s]);
            double first = inf, second = inf;
            for (std::size_t t = 0; t < sample.size(); ++t) {
                if (t == s) continue;
                const double d2 = squared_euclidean(ri, x.row(sample[t]));
                if (d2 <= 0.0) continue;
                if (d2 < first) {
                    second = first;
                    first = d2;
                } else if (d2 < second) {
                    second = d2;
                }
            }
            r1[s] = std::sqrt(first);
            r2[s] = std::sqrt(second);
        }
    });

    DimEstimate est;
    for (std::size_t s = 0; s < sample.size(); ++s) {
        if (std::isinf(r2[s])) {
            ++est.skipped;
            continue;
        }
        est.mu.push_back(r2[s] / r1[s]);
    }
    if (est.skipped * 2 > sample.size())
        throw Error(ErrorKind::DegenerateGeometry, "most samples lack two neighbors at positive distance");
    if (est.mu.size() < 3) throw Error(ErrorKind::DegenerateGeometry, "too few usable ratios");

    est.empirical_cdf = empirical_cdf(est.mu);

    const std::vector<std::size_t> order = argsort_ascending(est.mu);
    const auto keep = static_cast<std::size_t>(
        std::floor(static_cast<double>(order.size()) * (1.0 - options.trim_fraction)));
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t rank = 0; rank < keep; ++rank) {
        const std::size_t p = order[rank];
        const double tail = 1.0 - est.empirical_cdf[p];
        if (tail <= 0.0) continue;
        const double lx = std::log(est.mu[p]);
        const double ly = -std::log(tail);
        sxy += lx * ly;
        sxx += lx * lx;
        est.fitted.push_back(p);
    }
    if (sxx == 0.0) throw Error(ErrorKind::DegenerateGeometry, "all neighbor ratios equal one");

    est.slope = sxy / sxx;
    const double rounded = std::round(est.slope * options.dim_multiplier);
    if (rounded < 1.0) {
        est.clamped = true;
        est.d = 1;
    } else {
        est.d = static_cast<std::size_t>(rounded);
    }
    return est;
}

}  // namespace reliefe
