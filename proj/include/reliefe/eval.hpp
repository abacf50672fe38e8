#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "reliefe/dataset.hpp"
#include "reliefe/ranking.hpp"
#include "reliefe/sparse.hpp"

namespace reliefe {

struct ProbeOptions {
    /// Inverse ℓ₂ regularization strength.
    double c = 1.0;
    std::size_t max_epochs = 500;
    /// Stop when the relative objective change drops below this.
    double tolerance = 1e-6;
    std::size_t max_stratification_attempts = 5;
};

/// Binary ℓ₂-regularized logistic regression trained by full-batch
/// gradient descent with backtracking, starting from zero weights.
struct LogisticModel {
    std::vector<double> coef;
    double intercept = 0.0;
    std::size_t epochs = 0;

    /// positive[i] marks rows of the positive class among `rows` of x.
    static LogisticModel fit(const SparseMatrix& x, std::span<const std::size_t> rows,
                             std::span<const char> positive, const ProbeOptions& options);
    double decision(RowView r) const noexcept;
};

/// Stratified fold id per instance; strata are classes (MCC) or distinct
/// label sets (MLC).
std::vector<std::size_t> stratified_folds(const Targets& targets, std::size_t folds, std::uint64_t seed);

/// Mean micro-averaged F1 of the probe learner over stratified k-fold
/// cross-validation, restricted to `feature_subset`. Multi-class uses
/// one-vs-rest, multi-label uses binary relevance with a 0.5 threshold.
double probe_f1(const SparseMatrix& x, const Targets& targets, std::span<const std::size_t> feature_subset,
                std::size_t folds, std::uint64_t seed, const ProbeOptions& options = {});

struct CurvePoint {
    double f = 0.0;
    double f1 = 0.0;
    /// f1 relative to the all-features baseline.
    double rf1 = 0.0;
};

struct PerformanceCurve {
    std::vector<CurvePoint> points;
    double baseline_f1 = 0.0;
};

/// rF1(f) = F1(top f ranked features) / F1(all features) for every f in
/// the grid. The all-features point is exactly 1.
PerformanceCurve rf1_curve(const SparseMatrix& x, const Targets& targets, const FeatureWeights& ranking,
                           std::span<const std::size_t> f_grid, std::size_t folds, std::uint64_t seed,
                           const ProbeOptions& options = {});

/// Simpson integral of rF1 over f divided by the f-range. Pairs of
/// intervals use the non-uniform three-point rule; a trailing single
/// interval uses the trapezoid rule.
double aurf1(const PerformanceCurve& curve);

/// |top-k ∩ informative| / |informative|.
double recall_at_k(const FeatureWeights& ranking, std::span<const std::size_t> informative, std::size_t k);

}  // namespace reliefe
