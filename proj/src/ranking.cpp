#include "reliefe/ranking.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <string>

#include "reliefe/error.hpp"
#include "reliefe/rank_mcc.hpp"
#include "reliefe/rank_mlc.hpp"
#include "reliefe/rng.hpp"

namespace reliefe {

std::string_view to_string(MlcDistance tau) noexcept {
    switch (tau) {
        case MlcDistance::f1: return "f1";
        case MlcDistance::accuracy: return "accuracy";
        case MlcDistance::subset: return "subset";
        case MlcDistance::hamming: return "hamming";
        case MlcDistance::cosine_embedded: return "cosine";
        case MlcDistance::hyperbolic_embedded: return "hyperbolic";
    }
    return "hamming";
}

MlcDistance parse_mlc_distance(std::string_view name) {
    for (MlcDistance tau : {MlcDistance::f1, MlcDistance::accuracy, MlcDistance::subset, MlcDistance::hamming,
                            MlcDistance::cosine_embedded, MlcDistance::hyperbolic_embedded}) {
        if (to_string(tau) == name) return tau;
    }
    throw Error(ErrorKind::InvalidConfig, "unknown multi-label distance '" + std::string(name) + "'");
}

bool is_embedded(MlcDistance tau) noexcept {
    return tau == MlcDistance::cosine_embedded || tau == MlcDistance::hyperbolic_embedded;
}

void RankingConfig::validate() const {
    if (iterations && *iterations < 1) throw Error(ErrorKind::InvalidConfig, "iterations must be positive");
    if (k_neighbors < 1) throw Error(ErrorKind::InvalidConfig, "k must be positive");
    sparsify.validate();
    if (use_embedding || is_embedded(mlc_distance)) embedding.validate();
}

std::vector<std::size_t> FeatureWeights::ranking() const {
    std::vector<std::size_t> idx(weights.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return weights[a] > weights[b]; });
    return idx;
}

std::size_t sampled_instance(std::uint64_t seed, std::size_t iteration, std::size_t n_instances) {
    Rng rng = make_rng(seed, stream::rank_iteration, iteration);
    return static_cast<std::size_t>(uniform_index(rng, n_instances));
}

std::size_t adaptive_k(std::span<const double> sorted_distances) {
    if (sorted_distances.size() < 2) return 1;
    std::size_t best = 0;
    double best_gap = sorted_distances[1] - sorted_distances[0];
    for (std::size_t i = 1; i + 1 < sorted_distances.size(); ++i) {
        const double gap = sorted_distances[i + 1] - sorted_distances[i];
        if (gap > best_gap) {
            best_gap = gap;
            best = i;
        }
    }
    return best + 1;
}

RankResult rank(const Dataset& dataset, const RankingConfig& config) {
    return dataset.task() == Task::mcc ? rank_mcc(dataset, config) : rank_mlc(dataset, config);
}

namespace detail {

std::uint64_t now_ns() {
    return static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::nanoseconds>(
                                          std::chrono::steady_clock::now().time_since_epoch())
                                          .count());
}

double seconds_since(std::uint64_t start_ns) { return static_cast<double>(now_ns() - start_ns) * 1e-9; }

PreparedSpace::PreparedSpace(const Dataset& dataset, const RankingConfig& config, RankResult& result)
    : original_(&dataset.features) {
    auto t0 = now_ns();
    if (config.sparsify_enabled && dataset.features.nnz() > 0 && needs_sparsify(dataset.features, config.sparsify)) {
        SparsifyParams params = config.sparsify;
        if (!params.epsilon) params.epsilon = estimate_epsilon(dataset.features);
        result.epsilon = params.epsilon;
        sparsified_ = prms(dataset.features, params);
        result.sparsified = true;
    }
    result.timings.sparsify = seconds_since(t0);

    if (config.use_embedding) {
        t0 = now_ns();
        Embedding emb = manifold_projection(features(), dataset.targets, config.embedding);
        const double total = seconds_since(t0);
        result.timings.dim = emb.dim_seconds;
        result.timings.embed = std::max(0.0, total - emb.dim_seconds);
        result.embedding_dim = emb.dim();
        embedded_ = std::move(emb.coordinates);
    }
}

std::vector<double> PreparedSpace::distances(std::size_t i, DistanceMetric metric,
                                             std::span<const std::size_t> rows) const {
    return embedded_ ? row_distances(*embedded_, i, metric, rows) : row_distances(features(), i, metric, rows);
}

}  // namespace detail

}  // namespace reliefe
