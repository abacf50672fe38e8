#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "reliefe/embed.hpp"
#include "reliefe/rng.hpp"
#include "support/checks.hpp"
#include "support/synthetic.hpp"

using namespace reliefe;
using namespace reliefe::testing;

namespace {
std::vector<std::size_t> all_rows(std::size_t n) {
    std::vector<std::size_t> v(n);
    std::iota(v.begin(), v.end(), std::size_t{0});
    return v;
}

// Uniform draws in [-range, range], row-major, from the layout init stream.
std::vector<double> initial_coordinates(std::size_t n, std::size_t dim, const EmbeddingConfig& cfg) {
    Rng rng = make_rng(cfg.seed, stream::layout_init);
    std::vector<double> v(n * dim);
    for (double& x : v) x = cfg.init_range * (2.0 * uniform01(rng) - 1.0);
    return v;
}

double sq(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t c = 0; c < a.size(); ++c) s += (a[c] - b[c]) * (a[c] - b[c]);
    return s;
}
}  // namespace

TEST_CASE("representative_sample over classes") {
    const ClassVector abab{0, 0, 0, 1};
    const auto two = representative_sample(abab, 2);
    REQUIRE(two.size() == 2);
    CHECK(abab[two[0]] != abab[two[1]]);
    CHECK(representative_sample(ClassVector{0, 0, 1}, 3) == std::vector<std::size_t>{0, 1, 2});
    CHECK(representative_sample(ClassVector{0, 0, 1}, 10).size() == 3);
    CHECK_ERROR(representative_sample(ClassVector{0, 1, 2}, 2), InsufficientCap);
}

TEST_CASE("representative_sample over label sets") {
    // Label sets {1}, {1}, {1, 2}.
    const SparseMatrix labels = SparseMatrix::from_dense({{0, 1, 0}, {0, 1, 0}, {0, 1, 1}});
    const auto pick = representative_sample(labels, 2);
    REQUIRE(pick.size() == 2);
    std::set<std::vector<double>> sets;
    for (std::size_t r : pick) sets.insert({labels.at(r, 0), labels.at(r, 1), labels.at(r, 2)});
    CHECK(sets.size() == 2);
    CHECK(std::is_sorted(pick.begin(), pick.end()));
}

TEST_CASE("bandwidth solves the log2 k constraint") {
    const std::vector<double> d{0.5, 0.7, 0.9, 1.3, 2.0, 2.2, 3.1, 4.0};
    const Bandwidth bw = solve_bandwidth(d);
    CHECK_FALSE(bw.degenerate);
    CHECK(bw.omega == 0.5);
    double s = 0.0;
    for (double v : d) s += membership(v, bw);
    CHECK(std::abs(s - 3.0) <= 1e-5);
    CHECK(membership(0.5, bw) == 1.0);
}

TEST_CASE("flat neighborhoods fall back to beta one") {
    const Bandwidth flat = solve_bandwidth(std::vector<double>{1, 1, 1, 1});
    CHECK(flat.degenerate);
    CHECK(flat.beta == 1.0);
    const Bandwidth zeros = solve_bandwidth(std::vector<double>{0, 0, 0});
    CHECK(zeros.degenerate);
    CHECK(zeros.omega == 0.0);
    CHECK(zeros.beta == 1.0);
}

TEST_CASE("knn graph on a random matrix satisfies the constraint") {
    const std::size_t n = 40, f = 6;
    const auto vals = gaussian_values(n * f, 40);
    const SparseMatrix x = SparseMatrix::from_dense(n, f, vals);
    EmbeddingConfig cfg;
    cfg.k_neighbors = 8;
    const KnnGraph g = build_knn_graph(x, cfg, all_rows(n));
    CHECK(g.adjacency.n_rows() == n);
    for (std::size_t a = 0; a < n; ++a) {
        const RowView r = g.adjacency.row(a);
        CHECK(r.nnz() == 8);
        double s = 0.0, best = 0.0;
        for (std::size_t p = 0; p < r.nnz(); ++p) {
            CHECK(r.cols[p] != a);
            s += r.vals[p];
            best = std::max(best, r.vals[p]);
        }
        CHECK(best == 1.0);
        if (!g.degenerate[a]) CHECK(std::abs(s - 3.0) <= 1e-5);
    }
    CHECK_ERROR(build_knn_graph(x, cfg, std::vector<std::size_t>{0, 1, 2}), InvalidShape);
}

TEST_CASE("fuzzy union hand cases") {
    const SparseMatrix a = SparseMatrix::from_dense({{0, 0.5}, {0, 0}});
    const SparseMatrix b = fuzzy_union(a);
    CHECK(b.at(0, 1) == 0.5);
    CHECK(b.at(1, 0) == 0.5);
    const SparseMatrix c = fuzzy_union(SparseMatrix::from_dense({{0, 1}, {1, 0}}));
    CHECK(c.at(0, 1) == 1.0);
    CHECK_ERROR(fuzzy_union(SparseMatrix::from_dense({{0, 1.5}, {0, 0}})), InvalidWeight);
    CHECK_ERROR(fuzzy_union(SparseMatrix::from_dense({{0, 0.5, 0}})), InvalidShape);
}

TEST_CASE("fuzzy union matches the dense formula") {
    for (std::uint64_t s = 0; s < 10; ++s) {
        const std::size_t n = 12;
        SparseMatrix a = random_sparse(n, n, 0.3, 50 + s);
        auto d = a.to_dense();
        for (double& v : d) v = std::min(1.0, std::abs(v) / 3.0);
        a = SparseMatrix::from_dense(n, n, d);
        const SparseMatrix b = fuzzy_union(a);
        CHECK(b == b.transpose());
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                const double p = d[i * n + j], q = d[j * n + i];
                CHECK(std::abs(b.at(i, j) - (p + q - p * q)) <= 1e-12);
            }
    }
}

TEST_CASE("layout of a single node keeps its initialization") {
    EmbeddingConfig cfg;
    cfg.seed = 3;
    const DenseMatrix one = layout(SparseMatrix::zeros(1, 1), 3, cfg);
    const std::vector<double> init = initial_coordinates(1, 3, cfg);
    CHECK(one.data == init);
    for (double v : one.data) CHECK(std::abs(v) <= cfg.init_range);
}

TEST_CASE("attraction contracts a connected pair") {
    EmbeddingConfig cfg;
    cfg.negative_samples = 0;
    cfg.n_epochs = 200;
    const SparseMatrix pair = SparseMatrix::from_dense({{0, 1}, {1, 0}});
    const std::vector<double> before = initial_coordinates(2, 2, cfg);
    const DenseMatrix after = layout(pair, 2, cfg);
    const double d0 = (before[0] - before[2]) * (before[0] - before[2]) + (before[1] - before[3]) * (before[1] - before[3]);
    CHECK(sq(after.row(0), after.row(1)) < d0);
}

TEST_CASE("layout is deterministic in serial mode and finite in parallel mode") {
    const Dataset ds = blobs({{0, 0, 0}, {8, 0, 0}}, 40, 1.0, 60);
    EmbeddingConfig cfg;
    cfg.dim = 2;
    const Embedding a = manifold_projection(ds.features, ds.targets, cfg);
    const Embedding b = manifold_projection(ds.features, ds.targets, cfg);
    CHECK(a.coordinates.data == b.coordinates.data);
    cfg.parallel_layout = true;
    cfg.threads = 3;
    const Embedding c = manifold_projection(ds.features, ds.targets, cfg);
    for (double v : c.coordinates.data) CHECK(std::isfinite(v));
}

TEST_CASE("out-of-sample placement") {
    Embedding emb;
    emb.coordinates = DenseMatrix(4, 2);
    emb.coordinates(0, 0) = 1.0;
    emb.coordinates(0, 1) = 2.0;
    emb.coordinates(1, 0) = -3.0;
    emb.coordinates(1, 1) = 4.0;
    emb.trained_indices = {0, 1};
    // Row 2 duplicates row 0; row 3 sits halfway between rows 0 and 1.
    const SparseMatrix x = SparseMatrix::from_dense({{0, 0}, {2, 0}, {0, 0}, {1, 0}});
    EmbeddingConfig cfg;
    cfg.k_neighbors = 2;
    embed_out_of_sample(emb, x, std::vector<std::size_t>{2, 3}, cfg);
    CHECK(emb.coordinates(2, 0) == 1.0);
    CHECK(emb.coordinates(2, 1) == 2.0);
    CHECK(emb.coordinates(3, 0) == doctest::Approx(-1.0));
    CHECK(emb.coordinates(3, 1) == doctest::Approx(3.0));
    CHECK_ERROR(embed_out_of_sample(emb, x, std::vector<std::size_t>{0}, cfg), InvalidShape);
}

TEST_CASE("held-out blob rows land near their own blob") {
    const Dataset ds = blobs({{0, 0, 0, 0}, {10, 0, 0, 0}, {0, 10, 0, 0}}, 100, 1.0, 61);
    EmbeddingConfig cfg;
    cfg.dim = 2;
    cfg.sample_cap = 250;
    const Embedding e = manifold_projection(ds.features, ds.targets, cfg);
    REQUIRE(e.trained_indices.size() == 250);
    std::vector<bool> trained(300, false);
    for (std::size_t t : e.trained_indices) trained[t] = true;
    // Centroids of each blob's trained rows.
    std::vector<std::vector<double>> centroid(3, std::vector<double>(2, 0.0));
    std::vector<double> count(3, 0.0);
    for (std::size_t i = 0; i < 300; ++i) {
        if (!trained[i]) continue;
        const std::size_t c = ds.classes()[i];
        centroid[c][0] += e.coordinates(i, 0);
        centroid[c][1] += e.coordinates(i, 1);
        count[c] += 1.0;
    }
    for (std::size_t c = 0; c < 3; ++c)
        for (double& v : centroid[c]) v /= count[c];
    std::size_t held = 0, correct = 0;
    for (std::size_t i = 0; i < 300; ++i) {
        if (trained[i]) continue;
        ++held;
        std::size_t best = 0;
        for (std::size_t c = 1; c < 3; ++c)
            if (sq(e.coordinates.row(i), centroid[c]) < sq(e.coordinates.row(i), centroid[best])) best = c;
        correct += best == ds.classes()[i];
    }
    CHECK(held == 50);
    CHECK(static_cast<double>(correct) >= 0.8 * static_cast<double>(held));
}

TEST_CASE("manifold_projection shape and automatic dimension") {
    const SparseMatrix x = hypercube(600, 5, 62);
    const ClassVector one(600, 0);
    EmbeddingConfig cfg;
    cfg.n_epochs = 20;
    const Embedding e = manifold_projection(x, one, cfg);
    CHECK(e.trained_indices.size() == 600);
    CHECK(e.coordinates.n_rows == 600);
    REQUIRE(e.dim_estimate);
    CHECK(e.dim() >= 4);
    CHECK(e.dim() <= 6);
    for (double v : e.coordinates.data) CHECK(std::isfinite(v));
}

TEST_CASE("degenerate geometry falls back to the default dimension") {
    // Binary label rows over two labels: every neighbor ratio is one.
    std::vector<double> v;
    for (std::size_t i = 0; i < 40; ++i) {
        v.push_back(static_cast<double>(i % 2));
        v.push_back(static_cast<double>((i / 2) % 2));
    }
    const SparseMatrix x = SparseMatrix::from_dense(40, 2, v);
    EmbeddingConfig cfg;
    cfg.n_epochs = 10;
    const Embedding e = manifold_projection(x, ClassVector(40, 0), cfg);
    CHECK(e.dim_fallback);
    CHECK(e.dim() == kFallbackDim);
}

TEST_CASE("config validation") {
    EmbeddingConfig cfg;
    cfg.k_neighbors = 1;
    CHECK_ERROR(cfg.validate(), InvalidConfig);
}
