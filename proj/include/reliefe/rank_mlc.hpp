#pragma once

#include <cstddef>
#include <span>

#include "reliefe/dataset.hpp"
#include "reliefe/ranking.hpp"

namespace reliefe {

struct MlcUpdateStats {
    double t_diff = 0.0;
    double d_diff = 0.0;
    double td_diff = 0.0;
};

/// Distance between two target rows given as dense vectors. The binary
/// tags require 0/1 entries; the embedded tags take real rows, and the
/// hyperbolic tag expects Poincaré-ball coordinates (norm below 1).
double target_distance(std::span<const double> t1, std::span<const double> t2, MlcDistance tau);

/// Binary-tag distance on sparse label rows of length `n_labels`.
double label_distance(RowView t1, RowView t2, std::size_t n_labels, MlcDistance tau);

/// arccosh(-<x, y>_L) after lifting Poincaré-ball points p, q onto the
/// hyperboloid; arguments below 1 are clamped to 1.
double hyperbolic_distance(std::span<const double> p, std::span<const double> q);

/// Maps a Euclidean embedding coordinate, read as a tangent vector at the
/// origin, into the Poincaré ball: tanh(‖v‖/2)·v/‖v‖.
void to_poincare(std::span<const double> v, std::span<double> out);

/// Means of the target distances, descriptive distances and their
/// elementwise product over the neighborhood.
MlcUpdateStats mlc_update_stats(std::span<const double> target_dists, std::span<const double> desc_dists);

/// Weight increment for one feature. A zero t_diff carries no supervision
/// and yields 0; a t_diff of one drops the second term.
double mlc_weight_delta(const MlcUpdateStats& stats, MlcUpdateForm form = MlcUpdateForm::pseudocode);

/// Multi-label ranking. Neighbors are searched in the feature embedding
/// (when enabled) or the features; target distances use the label rows or,
/// for the embedded tags, a target-space embedding. Descriptive distances
/// are the per-feature |r[j] - n[j]| of the original feature values.
RankResult rank_mlc(const Dataset& dataset, const RankingConfig& config);

}  // namespace reliefe
