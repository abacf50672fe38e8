#include "reliefe/rank_mlc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "reliefe/error.hpp"
#include "reliefe/parallel.hpp"

namespace reliefe {

namespace {

void require_binary(std::span<const double> t) {
    for (double v : t)
        if (v != 0.0 && v != 1.0) throw Error(ErrorKind::InvalidLabelRow, "binary distance on a non-binary row");
}

void require_binary(RowView t) {
    for (double v : t.vals)
        if (v != 1.0) throw Error(ErrorKind::InvalidLabelRow, "binary distance on a non-binary row");
}

// Shared by the dense and sparse entry points: counts of labels in each row
// and in their intersection.
double binary_distance(double n1, double n2, double both, std::size_t length, MlcDistance tau) {
    switch (tau) {
        case MlcDistance::f1:
            return n1 + n2 > 0.0 ? 1.0 - 2.0 * both / (n1 + n2) : 0.0;
        case MlcDistance::accuracy: {
            const double either = n1 + n2 - both;
            return either > 0.0 ? 1.0 - both / either : 0.0;
        }
        case MlcDistance::subset:
            return (n1 == both && n2 == both) ? 0.0 : 1.0;
        case MlcDistance::hamming:
            if (length == 0) throw Error(ErrorKind::InvalidShape, "hamming distance on empty rows");
            return (n1 + n2 - 2.0 * both) / static_cast<double>(length);
        default:
            throw Error(ErrorKind::InvalidConfig, "not a binary target distance");
    }
}

}  // namespace

double hyperbolic_distance(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw Error(ErrorKind::InvalidShape, "target rows differ in length");
    double pp = 0.0, qq = 0.0, diff = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        pp += p[i] * p[i];
        qq += q[i] * q[i];
        diff += (p[i] - q[i]) * (p[i] - q[i]);
    }
    if (pp >= 1.0 || qq >= 1.0) throw Error(ErrorKind::InvalidValue, "point outside the Poincaré ball");
    // -<x, y>_L for the lifted points, written in the cancellation-free form
    // 1 + 2‖p - q‖² / ((1 - ‖p‖²)(1 - ‖q‖²)).
    const double arg = 1.0 + 2.0 * diff / ((1.0 - pp) * (1.0 - qq));
    return std::acosh(std::max(1.0, arg));
}

void to_poincare(std::span<const double> v, std::span<double> out) {
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    const double scale = norm > 0.0 ? std::tanh(0.5 * norm) / norm : 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] * scale;
}

double target_distance(std::span<const double> t1, std::span<const double> t2, MlcDistance tau) {
    if (t1.size() != t2.size()) throw Error(ErrorKind::InvalidShape, "target rows differ in length");
    if (tau == MlcDistance::cosine_embedded) {
        double ab = 0.0, aa = 0.0, bb = 0.0;
        for (std::size_t i = 0; i < t1.size(); ++i) {
            ab += t1[i] * t2[i];
            aa += t1[i] * t1[i];
            bb += t2[i] * t2[i];
        }
        if (aa == 0.0 || bb == 0.0) throw Error(ErrorKind::DegenerateRow, "cosine distance on a zero-norm row");
        return std::max(0.0, 1.0 - ab / std::sqrt(aa * bb));
    }
    if (tau == MlcDistance::hyperbolic_embedded) return hyperbolic_distance(t1, t2);
    require_binary(t1);
    require_binary(t2);
    double n1 = 0.0, n2 = 0.0, both = 0.0;
    for (std::size_t i = 0; i < t1.size(); ++i) {
        n1 += t1[i];
        n2 += t2[i];
        both += t1[i] * t2[i];
    }
    return binary_distance(n1, n2, both, t1.size(), tau);
}

double label_distance(RowView t1, RowView t2, std::size_t n_labels, MlcDistance tau) {
    require_binary(t1);
    require_binary(t2);
    std::size_t both = 0, p = 0, q = 0;
    while (p < t1.nnz() && q < t2.nnz()) {
        if (t1.cols[p] < t2.cols[q]) {
            ++p;
        } else if (t2.cols[q] < t1.cols[p]) {
            ++q;
        } else {
            ++both;
            ++p;
            ++q;
        }
    }
    return binary_distance(static_cast<double>(t1.nnz()), static_cast<double>(t2.nnz()),
                           static_cast<double>(both), n_labels, tau);
}

MlcUpdateStats mlc_update_stats(std::span<const double> target_dists, std::span<const double> desc_dists) {
    if (target_dists.empty()) throw Error(ErrorKind::EmptyNeighborhood, "statistics need at least one neighbor");
    if (target_dists.size() != desc_dists.size())
        throw Error(ErrorKind::InvalidShape, "target and descriptive distance counts differ");
    MlcUpdateStats s;
    for (std::size_t i = 0; i < target_dists.size(); ++i) {
        s.t_diff += target_dists[i];
        s.d_diff += desc_dists[i];
        s.td_diff += target_dists[i] * desc_dists[i];
    }
    const auto k = static_cast<double>(target_dists.size());
    s.t_diff /= k;
    s.d_diff /= k;
    s.td_diff /= k;
    return s;
}

double mlc_weight_delta(const MlcUpdateStats& stats, MlcUpdateForm form) {
    const double t = stats.t_diff, d = stats.d_diff, td = stats.td_diff;
    if (t == 0.0) return 0.0;
    if (form == MlcUpdateForm::pseudocode) {
        if (t == 1.0) return td;
        // td/t - (d - td)/(1 - t) over a common denominator.
        return (td - t * d) / (t * (1.0 - t));
    }
    const double hit = td / t;
    return td == 1.0 ? hit : hit - (d - t) / (1.0 - td);
}

RankResult rank_mlc(const Dataset& dataset, const RankingConfig& config) {
    config.validate();
    dataset.validate();
    if (dataset.task() != Task::mlc) throw Error(ErrorKind::InvalidConfig, "rank_mlc needs a label matrix");
    const SparseMatrix& labels = dataset.labels();
    const std::size_t n = dataset.n_instances();
    if (n < 2) throw Error(ErrorKind::InvalidShape, "ranking needs at least two instances");

    RankResult result;
    const detail::PreparedSpace space(dataset, config, result);
    const SparseMatrix& features = space.features();

    // Target-space embedding for the embedded distances, mapped into the
    // Poincaré ball for the hyperbolic one.
    DenseMatrix target_space;
    if (is_embedded(config.mlc_distance)) {
        const auto t0 = detail::now_ns();
        EmbeddingConfig tcfg = config.embedding;
        tcfg.metric = DistanceMetric::euclidean;
        Embedding et = manifold_projection(labels, dataset.targets, tcfg);
        result.timings.dim += et.dim_seconds;
        result.timings.embed += std::max(0.0, detail::seconds_since(t0) - et.dim_seconds);
        target_space = std::move(et.coordinates);
        result.target_embedding_dim = target_space.n_cols;
        if (config.mlc_distance == MlcDistance::hyperbolic_embedded) {
            for (std::size_t i = 0; i < n; ++i) {
                std::vector<double> v(target_space.row(i).begin(), target_space.row(i).end());
                to_poincare(v, target_space.row(i));
            }
        }
    }
    auto tdist = [&](std::size_t a, std::size_t b) {
        if (is_embedded(config.mlc_distance))
            return target_distance(target_space.row(a), target_space.row(b), config.mlc_distance);
        return label_distance(labels.row(a), labels.row(b), labels.n_cols(), config.mlc_distance);
    };

    const auto t0 = detail::now_ns();
    const std::size_t s = config.iterations.value_or(n);
    const std::size_t f = features.n_cols();
    if (config.record_k) result.selected_k.assign(s, 0);
    const std::size_t threads = config.serial ? 1 : std::max<std::size_t>(1, config.threads);
    std::vector<std::vector<double>> partial(threads, std::vector<double>(f, 0.0));
    std::vector<std::size_t> skipped(threads, 0);

    parallel_for(s, threads, [&](std::size_t begin, std::size_t end, std::size_t th) {
        std::vector<double>& w = partial[th];
        std::vector<std::size_t> others(n - 1);
        std::vector<double> sorted, tds;
        // Per-feature sums of |r_j - n_j| and t·|r_j - n_j| over neighbors.
        std::vector<double> d_sum(f, 0.0), td_sum(f, 0.0);
        std::vector<char> mark(f, 0);
        std::vector<Index> touched;
        for (std::size_t it = begin; it < end; ++it) {
            const std::size_t i = sampled_instance(config.seed, it, n);
            for (std::size_t j = 0, o = 0; j < n; ++j)
                if (j != i) others[o++] = j;
            const std::vector<double> dists = space.distances(i, config.metric, others);
            const std::vector<std::size_t> order = argsort_ascending(dists);
            sorted.resize(order.size());
            for (std::size_t p = 0; p < order.size(); ++p) sorted[p] = dists[order[p]];
            const std::size_t k =
                config.adaptive_threshold ? adaptive_k(sorted) : std::min(config.k_neighbors, others.size());
            if (config.record_k) result.selected_k[it] = k;

            tds.resize(k);
            double t_sum = 0.0;
            for (std::size_t p = 0; p < k; ++p) t_sum += (tds[p] = tdist(i, others[order[p]]));

            const RowView r = features.row(i);
            auto add = [&](Index j, double diff, double t) {
                if (!mark[j]) {
                    mark[j] = 1;
                    touched.push_back(j);
                }
                d_sum[j] += diff;
                td_sum[j] += t * diff;
            };
            for (std::size_t p = 0; p < k; ++p) {
                const RowView nb = features.row(others[order[p]]);
                const double t = tds[p];
                std::size_t a = 0, b = 0;
                while (a < r.nnz() || b < nb.nnz()) {
                    if (b == nb.nnz() || (a < r.nnz() && r.cols[a] < nb.cols[b])) {
                        add(r.cols[a], std::abs(r.vals[a]), t);
                        ++a;
                    } else if (a == r.nnz() || nb.cols[b] < r.cols[a]) {
                        add(nb.cols[b], std::abs(nb.vals[b]), t);
                        ++b;
                    } else {
                        add(r.cols[a], std::abs(r.vals[a] - nb.vals[b]), t);
                        ++a;
                        ++b;
                    }
                }
            }
            const auto kk = static_cast<double>(k);
            const double t_diff = t_sum / kk;
            if (t_diff == 0.0) ++skipped[th];
            if (config.update_form == MlcUpdateForm::text) {
                // The text form is nonzero even where every difference is zero.
                const double base = mlc_weight_delta({t_diff, 0.0, 0.0}, config.update_form);
                for (std::size_t j = 0; j < f; ++j)
                    if (!mark[j]) w[j] += base;
            }
            for (Index j : touched) {
                const MlcUpdateStats stats{t_diff, d_sum[j] / kk, td_sum[j] / kk};
                w[j] += mlc_weight_delta(stats, config.update_form);
                d_sum[j] = td_sum[j] = 0.0;
                mark[j] = 0;
            }
            touched.clear();
        }
    });

    result.weights.weights = std::move(partial[0]);
    for (std::size_t t = 1; t < threads; ++t)
        for (std::size_t j = 0; j < f; ++j) result.weights.weights[j] += partial[t][j];
    for (std::size_t v : skipped) result.skipped_updates += v;
    result.timings.rank = detail::seconds_since(t0);
    return result;
}

}  // namespace reliefe
