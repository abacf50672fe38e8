#include "reliefe/rank_mcc.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "reliefe/error.hpp"
#include "reliefe/parallel.hpp"

namespace reliefe {

ClassPriors ClassPriors::from_classes(const ClassVector& classes) {
    ClassPriors p;
    p.priors.assign(class_count(classes), 0.0);
    for (std::size_t c : classes) p.priors[c] += 1.0;
    for (double& v : p.priors) v /= static_cast<double>(classes.size());
    return p;
}

double prior_weight(std::size_t c, std::size_t c_i, const ClassPriors& priors) {
    if (c >= priors.priors.size() || c_i >= priors.priors.size())
        throw Error(ErrorKind::InvalidValue, "class id out of range");
    if (priors.priors[c_i] >= 1.0) throw Error(ErrorKind::SingleClass, "all instances share one class");
    if (c == c_i) return -1.0;
    return priors.priors[c] / (1.0 - priors.priors[c_i]);
}

WeightUpdater::WeightUpdater(std::size_t n_features)
    : acc_(n_features, 0.0), self_(n_features, 0.0), mark_(n_features, 0) {}

void WeightUpdater::touch(Index j) {
    if (!mark_[j]) {
        mark_[j] = 1;
        touched_.push_back(j);
    }
}

void WeightUpdater::reset() {
    for (Index j : touched_) {
        acc_[j] = 0.0;
        self_[j] = 0.0;
        mark_[j] = 0;
    }
    touched_.clear();
}

void WeightUpdater::abs_mean(std::span<double> w, RowView r, std::span<const RowView> neighbors, double prior) {
    if (neighbors.empty()) throw Error(ErrorKind::EmptyNeighborhood, "update needs at least one neighbor");
    for (std::size_t p = 0; p < r.nnz(); ++p) {
        touch(r.cols[p]);
        self_[r.cols[p]] = r.vals[p];
    }
    for (const RowView& n : neighbors) {
        for (std::size_t p = 0; p < n.nnz(); ++p) {
            touch(n.cols[p]);
            acc_[n.cols[p]] += n.vals[p];
        }
    }
    const auto k = static_cast<double>(neighbors.size());
    for (Index j : touched_) w[j] += std::abs(self_[j] - acc_[j] / k) * prior;
    reset();
}

void WeightUpdater::classic(std::span<double> w, RowView r, std::span<const RowView> neighbors, double prior) {
    if (neighbors.empty()) throw Error(ErrorKind::EmptyNeighborhood, "update needs at least one neighbor");
    for (std::size_t p = 0; p < r.nnz(); ++p) {
        touch(r.cols[p]);
        self_[r.cols[p]] = r.vals[p];
    }
    // Per neighbor, |r_j - n_j| over the union of both supports; columns in
    // r's support but absent from n contribute |r_j|.
    for (const RowView& n : neighbors) {
        std::size_t p = 0, q = 0;
        while (p < r.nnz() || q < n.nnz()) {
            if (q == n.nnz() || (p < r.nnz() && r.cols[p] < n.cols[q])) {
                acc_[r.cols[p]] += std::abs(r.vals[p]);
                ++p;
            } else if (p == r.nnz() || n.cols[q] < r.cols[p]) {
                touch(n.cols[q]);
                acc_[n.cols[q]] += std::abs(-n.vals[q]);
                ++q;
            } else {
                acc_[r.cols[p]] += std::abs(r.vals[p] - n.vals[q]);
                ++p;
                ++q;
            }
        }
    }
    const auto k = static_cast<double>(neighbors.size());
    for (Index j : touched_) w[j] += acc_[j] / k * prior;
    reset();
}

void update_abs_mean(std::span<double> w, RowView r, std::span<const RowView> neighbors, double prior) {
    WeightUpdater(w.size()).abs_mean(w, r, neighbors, prior);
}

void update_classic(std::span<double> w, RowView r, std::span<const RowView> neighbors, double prior) {
    WeightUpdater(w.size()).classic(w, r, neighbors, prior);
}

RankResult rank_mcc(const Dataset& dataset, const RankingConfig& config) {
    config.validate();
    dataset.validate();
    if (dataset.task() != Task::mcc) throw Error(ErrorKind::InvalidConfig, "rank_mcc needs class targets");
    const ClassVector& classes = dataset.classes();
    const std::size_t n = dataset.n_instances();
    if (n == 0) throw Error(ErrorKind::InvalidShape, "empty dataset");

    const ClassPriors priors = ClassPriors::from_classes(classes);
    std::size_t populated = 0;
    for (double p : priors.priors) populated += p > 0.0;
    if (populated < 2) throw Error(ErrorKind::SingleClass, "ranking needs at least two classes");

    RankResult result;
    const detail::PreparedSpace space(dataset, config, result);
    const SparseMatrix& features = space.features();

    const auto t0 = detail::now_ns();
    const std::size_t n_classes = priors.priors.size();
    std::vector<std::vector<std::size_t>> members(n_classes);
    for (std::size_t i = 0; i < n; ++i) members[classes[i]].push_back(i);

    const std::size_t s = config.iterations.value_or(n);
    if (config.record_k) result.selected_k.assign(s * n_classes, 0);
    const std::size_t threads = config.serial ? 1 : std::max<std::size_t>(1, config.threads);
    std::vector<std::vector<double>> partial(threads, std::vector<double>(features.n_cols(), 0.0));
    std::vector<std::size_t> skipped(threads, 0);

    parallel_for(s, threads, [&](std::size_t begin, std::size_t end, std::size_t t) {
        WeightUpdater updater(features.n_cols());
        std::vector<double>& w = partial[t];
        std::vector<std::size_t> candidates;
        std::vector<double> sorted;
        std::vector<RowView> neighbors;
        for (std::size_t it = begin; it < end; ++it) {
            const std::size_t i = sampled_instance(config.seed, it, n);
            const std::size_t c_i = classes[i];
            for (std::size_t c = 0; c < n_classes; ++c) {
                if (members[c].empty()) continue;
                candidates.clear();
                for (std::size_t m : members[c])
                    if (m != i) candidates.push_back(m);
                if (candidates.empty()) {
                    ++skipped[t];
                    continue;
                }
                const std::vector<double> dists = space.distances(i, config.metric, candidates);
                const std::vector<std::size_t> order = argsort_ascending(dists);
                sorted.resize(order.size());
                for (std::size_t p = 0; p < order.size(); ++p) sorted[p] = dists[order[p]];
                const std::size_t k = config.adaptive_threshold
                                          ? adaptive_k(sorted)
                                          : std::min(config.k_neighbors, candidates.size());
                if (config.record_k) result.selected_k[it * n_classes + c] = k;
                neighbors.clear();
                for (std::size_t p = 0; p < k; ++p) neighbors.push_back(features.row(candidates[order[p]]));
                const double prior = prior_weight(c, c_i, priors);
                if (config.abs_mean_update) {
                    updater.abs_mean(w, features.row(i), neighbors, prior);
                } else {
                    updater.classic(w, features.row(i), neighbors, prior);
                }
            }
        }
    });

    result.weights.weights = std::move(partial[0]);
    for (std::size_t t = 1; t < threads; ++t)
        for (std::size_t j = 0; j < result.weights.weights.size(); ++j) result.weights.weights[j] += partial[t][j];
    for (std::size_t v : skipped) result.skipped_updates += v;
    result.timings.rank = detail::seconds_since(t0);
    return result;
}

}  // namespace reliefe
