#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "reliefe/dataset.hpp"
#include "reliefe/intrinsic_dim.hpp"
#include "reliefe/sparse.hpp"

namespace reliefe {

inline constexpr std::size_t kFallbackDim = 2;

struct EmbeddingConfig {
    /// Target dimension; estimated from the sampled rows when unset.
    std::optional<std::size_t> dim;
    std::size_t k_neighbors = 15;
    std::size_t n_epochs = 200;
    double a = 1.0;
    double b = 1.0;
    double eta = 1e-3;
    /// Initial step size, decayed linearly to zero over the epochs.
    double learning_rate = 1.0;
    std::size_t negative_samples = 5;
    /// ν: maximum number of rows the layout is trained on.
    std::size_t sample_cap = 2048;
    DistanceMetric metric = DistanceMetric::euclidean;
    std::uint64_t seed = 0;
    /// Half-width of the uniform initialization box.
    double init_range = 10.0;
    /// Hogwild updates across threads. Finite output is guaranteed, bitwise
    /// reproducibility is not.
    bool parallel_layout = false;
    std::size_t threads = 1;
    DimOptions dim_options;

    void validate() const;
};

/// Directed k-NN membership graph over a row subset (local indices).
struct KnnGraph {
    SparseMatrix adjacency;
    std::vector<double> omegas;
    std::vector<double> betas;
    /// Nodes whose bandwidth equation has no solution; they use β = 1.
    std::vector<bool> degenerate;

    std::size_t degenerate_count() const noexcept;
};

struct Embedding {
    DenseMatrix coordinates;
    std::vector<std::size_t> trained_indices;
    std::optional<DimEstimate> dim_estimate;
    std::size_t degenerate_nodes = 0;
    /// The automatic estimate hit DegenerateGeometry (e.g. a binary label
    /// lattice where every neighbor ratio is one) and the fallback
    /// dimension was used instead.
    bool dim_fallback = false;
    /// Wall-clock seconds spent estimating the dimension (0 when fixed).
    double dim_seconds = 0.0;

    std::size_t dim() const noexcept { return coordinates.n_cols; }
};

/// Smoothing parameters of one node given its ascending neighbor distances.
struct Bandwidth {
    double omega = 0.0;
    double beta = 1.0;
    bool degenerate = false;
};

/// ω = smallest positive distance; β solves Σ exp(-max(0, d - ω)/β) = log₂(k)
/// by bisection. Nodes for which the target is unreachable get β = 1 and
/// are flagged.
Bandwidth solve_bandwidth(std::span<const double> neighbor_distances);

/// Edge membership exp(-max(0, d - ω)/β).
double membership(double distance, const Bandwidth& bw) noexcept;

/// Cyclic pass over distinct classes, one unchosen instance per class per
/// pass, until min(cap, n) rows are chosen. Result is sorted ascending.
std::vector<std::size_t> representative_sample(const ClassVector& classes, std::size_t cap);
/// Same over distinct label sets, in order of first appearance.
std::vector<std::size_t> representative_sample(const SparseMatrix& labels, std::size_t cap);
std::vector<std::size_t> representative_sample(const Targets& targets, std::size_t cap);

KnnGraph build_knn_graph(const SparseMatrix& x, const EmbeddingConfig& config,
                         std::span<const std::size_t> rows);

/// B = A + Aᵀ - A ⊙ Aᵀ for a square membership matrix with entries in [0, 1].
SparseMatrix fuzzy_union(const SparseMatrix& a);

/// Stochastic force layout of a symmetric membership graph into `dim`
/// dimensions, starting from a uniform random box.
DenseMatrix layout(const SparseMatrix& graph, std::size_t dim, const EmbeddingConfig& config);

/// Places `new_rows` of x at the membership-weighted mean of their k nearest
/// trained rows. Rows at distance zero from trained rows snap onto them.
void embed_out_of_sample(Embedding& embedding, const SparseMatrix& x,
                         std::span<const std::size_t> new_rows, const EmbeddingConfig& config);

/// Full pipeline: representative sampling when n > ν, optional dimension
/// estimate (kFallbackDim, capped by the column count, when it is
/// degenerate), graph, fuzzy union, layout, then out-of-sample placement of the
/// remaining rows. `targets` drives the sampling; pass the row count's worth
/// of a single class when no supervision is available.
Embedding manifold_projection(const SparseMatrix& x, const Targets& targets,
                              const EmbeddingConfig& config);

}  // namespace reliefe
