#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "reliefe/dataset.hpp"
#include "reliefe/embed.hpp"
#include "reliefe/sparse.hpp"
#include "reliefe/sparsify.hpp"

namespace reliefe {

/// Target-space distance used by the multi-label update.
enum class MlcDistance { f1, accuracy, subset, hamming, cosine_embedded, hyperbolic_embedded };

/// Which algebraic form of the multi-label update to apply.
///  pseudocode: td/t - (d - td)/(1 - t)
///  text:       td/t - (d - t)/(1 - td)
enum class MlcUpdateForm { pseudocode, text };

std::string_view to_string(MlcDistance tau) noexcept;
MlcDistance parse_mlc_distance(std::string_view name);
bool is_embedded(MlcDistance tau) noexcept;

struct RankingConfig {
    /// s; defaults to the number of instances.
    std::optional<std::size_t> iterations;
    std::size_t k_neighbors = 15;
    bool adaptive_threshold = false;
    bool abs_mean_update = false;
    bool use_embedding = false;
    DistanceMetric metric = DistanceMetric::euclidean;
    MlcDistance mlc_distance = MlcDistance::hamming;
    MlcUpdateForm update_form = MlcUpdateForm::pseudocode;
    EmbeddingConfig embedding;
    SparsifyParams sparsify;
    /// When false the input is ranked as given, whatever its density.
    bool sparsify_enabled = true;
    std::uint64_t seed = 0;
    /// Serial mode is bitwise reproducible; parallel mode sums per-thread
    /// weight vectors at the end.
    bool serial = true;
    std::size_t threads = 1;
    /// Keep every selected neighborhood size (iteration-major, class-minor).
    bool record_k = false;

    void validate() const;
};

struct FeatureWeights {
    std::vector<double> weights;

    std::size_t size() const noexcept { return weights.size(); }
    /// Feature indices by descending weight, ties by lower index.
    std::vector<std::size_t> ranking() const;
};

struct StageTimings {
    double sparsify = 0.0;
    double dim = 0.0;
    double embed = 0.0;
    double rank = 0.0;
};

struct RankResult {
    FeatureWeights weights;
    StageTimings timings;
    bool sparsified = false;
    std::optional<double> epsilon;
    /// Embedding dimension of the feature space (0 when not embedded).
    std::size_t embedding_dim = 0;
    std::size_t target_embedding_dim = 0;
    /// (instance, class) pairs without selectable neighbors (MCC), or
    /// iterations whose update was dropped by a guard (MLC).
    std::size_t skipped_updates = 0;
    std::vector<std::size_t> selected_k;
};

/// Index of the instance drawn at iteration `iteration` (uniform, with
/// replacement).
std::size_t sampled_instance(std::uint64_t seed, std::size_t iteration, std::size_t n_instances);

/// Position just past the largest gap of an ascending distance vector; the
/// first maximal gap wins. Vectors shorter than 2 give 1.
std::size_t adaptive_k(std::span<const double> sorted_distances);

/// Runs rank_mcc or rank_mlc according to the dataset's task.
RankResult rank(const Dataset& dataset, const RankingConfig& config);

namespace detail {

/// Feature matrix after optional sparsification and the matrix neighbor
/// distances are computed in (the feature embedding or the features).
class PreparedSpace {
public:
    PreparedSpace(const Dataset& dataset, const RankingConfig& config, RankResult& result);

    const SparseMatrix& features() const noexcept { return sparsified_ ? *sparsified_ : *original_; }
    bool embedded() const noexcept { return embedded_.has_value(); }
    /// Distances from instance i to `rows` in the search space.
    std::vector<double> distances(std::size_t i, DistanceMetric metric, std::span<const std::size_t> rows) const;

private:
    const SparseMatrix* original_;
    std::optional<SparseMatrix> sparsified_;
    std::optional<DenseMatrix> embedded_;
};

double seconds_since(std::uint64_t start_ns);
std::uint64_t now_ns();

}  // namespace detail

}  // namespace reliefe
