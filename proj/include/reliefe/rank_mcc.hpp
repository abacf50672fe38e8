#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "reliefe/dataset.hpp"
#include "reliefe/ranking.hpp"

namespace reliefe {

/// Empirical class frequencies indexed by class id.
struct ClassPriors {
    std::vector<double> priors;

    static ClassPriors from_classes(const ClassVector& classes);
};

/// -1 for the sampled instance's own class, P[c] / (1 - P[c_i]) otherwise.
/// Throws SingleClass when P[c_i] = 1.
double prior_weight(std::size_t c, std::size_t c_i, const ClassPriors& priors);

/// Accumulates weight updates touching only the union of the rows'
/// supports. Holds dense scratch of length |F|; one per thread.
class WeightUpdater {
public:
    explicit WeightUpdater(std::size_t n_features);

    /// w[j] += |r[j] - mean_n(n[j])| · prior
    void abs_mean(std::span<double> w, RowView r, std::span<const RowView> neighbors, double prior);
    /// w[j] += (Σ_n |r[j] - n[j]|) / k · prior
    void classic(std::span<double> w, RowView r, std::span<const RowView> neighbors, double prior);

private:
    void touch(Index j);
    void reset();

    std::vector<double> acc_;
    std::vector<double> self_;
    std::vector<char> mark_;
    std::vector<Index> touched_;
};

void update_abs_mean(std::span<double> w, RowView r, std::span<const RowView> neighbors, double prior);
void update_classic(std::span<double> w, RowView r, std::span<const RowView> neighbors, double prior);

/// Multi-class ranking. Neighbors of each sampled instance are searched per
/// class (excluding the instance itself) in the embedding when enabled and
/// in the feature space otherwise; updates always read feature values.
RankResult rank_mcc(const Dataset& dataset, const RankingConfig& config);

}  // namespace reliefe
