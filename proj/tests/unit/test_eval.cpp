#include <doctest.h>

#include <cmath>
#include <numeric>

#include "reliefe/eval.hpp"
#include "support/checks.hpp"
#include "support/synthetic.hpp"

using namespace reliefe;
using namespace reliefe::testing;

namespace {
// Feature 0 separates the classes; the others are noise.
Dataset separable(std::size_t n, std::size_t noise, std::uint64_t seed) {
    Rng rng = test_rng(seed);
    std::vector<double> v;
    ClassVector y(n);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = i % 2;
        v.push_back(y[i] == 1 ? 1.0 + uniform01(rng) : -1.0 - uniform01(rng));
        for (std::size_t j = 0; j < noise; ++j) v.push_back(gaussian(rng));
    }
    return {SparseMatrix::from_dense(n, 1 + noise, v), y};
}

std::vector<std::size_t> all(std::size_t n) {
    std::vector<std::size_t> v(n);
    std::iota(v.begin(), v.end(), std::size_t{0});
    return v;
}
}  // namespace

TEST_CASE("stratified folds keep class proportions") {
    ClassVector y(30);
    for (std::size_t i = 0; i < 30; ++i) y[i] = i < 20 ? 0 : 1;
    const auto folds = stratified_folds(y, 5, 3);
    std::vector<std::size_t> zeros(5, 0), ones(5, 0);
    for (std::size_t i = 0; i < 30; ++i) (y[i] == 0 ? zeros : ones)[folds[i]]++;
    for (std::size_t f = 0; f < 5; ++f) {
        CHECK(zeros[f] == 4);
        CHECK(ones[f] == 2);
    }
    CHECK(folds == stratified_folds(y, 5, 3));
}

TEST_CASE("probe F1 on separable and shuffled data") {
    const Dataset ds = separable(60, 0, 100);
    CHECK(probe_f1(ds.features, ds.targets, all(1), 3, 1) == 1.0);

    double mean = 0.0;
    for (std::uint64_t s = 0; s < 5; ++s) {
        const Dataset noise = mcc_informative(120, 0, 5, 0.0, 101 + s);
        mean += probe_f1(noise.features, noise.targets, all(5), 3, s) / 5.0;
    }
    CHECK(std::abs(mean - 0.5) <= 0.1);

    const Dataset d = separable(60, 3, 102);
    CHECK(probe_f1(d.features, d.targets, all(4), 3, 2) == probe_f1(d.features, d.targets, std::vector<std::size_t>{3, 2, 1, 0, 0}, 3, 2));
}

TEST_CASE("stratification fails when a class cannot reach every training split") {
    const SparseMatrix x = SparseMatrix::from_dense({{1}, {2}, {3}, {4}});
    CHECK_ERROR(probe_f1(x, ClassVector{0, 0, 0, 1}, all(1), 2, 0), StratificationFailed);
}

TEST_CASE("multi-label probe") {
    const Dataset ds = mlc_threshold(90, 4, 2, 103);
    const double f1 = probe_f1(ds.features, ds.targets, all(4), 3, 0);
    CHECK(f1 > 0.8);
    CHECK(f1 <= 1.0);
}

TEST_CASE("logistic model separates a line") {
    const SparseMatrix x = SparseMatrix::from_dense({{-2}, {-1}, {1}, {2}});
    const std::vector<char> pos{0, 0, 1, 1};
    const LogisticModel m = LogisticModel::fit(x, all(4), pos, {});
    CHECK(m.decision(x.row(0)) < 0.0);
    CHECK(m.decision(x.row(3)) > 0.0);
    CHECK(m.epochs >= 1);
}

TEST_CASE("rF1 curve") {
    const Dataset ds = separable(60, 4, 104);
    FeatureWeights good{{5, 1, 1, 1, 1}};
    const std::vector<std::size_t> grid{1, 3, 5};
    const PerformanceCurve c = rf1_curve(ds.features, ds.targets, good, grid, 3, 0);
    REQUIRE(c.points.size() == 3);
    CHECK(c.points.back().rf1 == 1.0);
    CHECK(c.points.front().rf1 >= 1.0);

    FeatureWeights worst{{-5, 1, 1, 1, 1}};
    const PerformanceCurve w = rf1_curve(ds.features, ds.targets, worst, std::vector<std::size_t>{1, 5}, 3, 0);
    CHECK(w.points.front().rf1 <= w.points.back().rf1);

    CHECK_ERROR(rf1_curve(ds.features, ds.targets, good, std::vector<std::size_t>{0, 5}, 3, 0), InvalidConfig);
    CHECK_ERROR(rf1_curve(ds.features, ds.targets, good, std::vector<std::size_t>{3, 2}, 3, 0), InvalidConfig);
}

TEST_CASE("rF1 baseline of zero is rejected") {
    // A rare label and uninformative features: the probe never predicts it.
    const SparseMatrix x = SparseMatrix::zeros(6, 2);
    const SparseMatrix labels = SparseMatrix::from_dense({{1}, {1}, {0}, {0}, {0}, {0}});
    CHECK_ERROR(rf1_curve(x, labels, FeatureWeights{{1, 0}}, std::vector<std::size_t>{1, 2}, 2, 0),
                BaselineDegenerate);
}

TEST_CASE("AUrF1") {
    PerformanceCurve ones;
    for (double f : {1.0, 2.0, 3.0}) ones.points.push_back({f, 0.7, 1.0});
    CHECK(aurf1(ones) == 1.0);

    PerformanceCurve quad;
    const double F = 10.0;
    for (int p = 0; p <= 10; ++p) quad.points.push_back({double(p), 0.0, (p / F) * (p / F)});
    CHECK(std::abs(aurf1(quad) - 1.0 / 3.0) <= 1e-12);

    // Non-uniform spacing with a trailing trapezoid interval on a linear curve.
    PerformanceCurve lin;
    for (double f : {1.0, 2.0, 5.0, 6.0}) lin.points.push_back({f, 0.0, f});
    CHECK(std::abs(aurf1(lin) - 3.5) <= 1e-12);

    PerformanceCurve two;
    two.points = {{1, 0, 1}, {2, 0, 1}};
    CHECK_ERROR(aurf1(two), InsufficientPoints);
    PerformanceCurve back;
    back.points = {{1, 0, 1}, {3, 0, 1}, {2, 0, 1}};
    CHECK_ERROR(aurf1(back), InvalidValue);
}

TEST_CASE("recall_at_k") {
    const FeatureWeights w{{10, 9, 8, 7, 6, 5, 4, 3, 2, 1}};
    CHECK(recall_at_k(w, std::vector<std::size_t>{0, 1, 2}, 3) == 1.0);
    CHECK(recall_at_k(w, std::vector<std::size_t>{7, 8, 9}, 3) == 0.0);
    std::vector<double> many(40);
    for (std::size_t j = 0; j < 40; ++j) many[j] = 40.0 - static_cast<double>(j);
    std::vector<std::size_t> informative;
    for (std::size_t j = 15; j < 25; ++j) informative.push_back(j);
    CHECK(recall_at_k(FeatureWeights{many}, informative, 20) == 0.5);
    CHECK_ERROR(recall_at_k(w, std::vector<std::size_t>{1}, 0), InvalidConfig);
}
