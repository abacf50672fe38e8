#include <doctest.h>

#include <cmath>

#include "reliefe/rank_mcc.hpp"
#include "support/checks.hpp"
#include "support/synthetic.hpp"

using namespace reliefe;
using namespace reliefe::testing;

TEST_CASE("adaptive_k") {
    CHECK(adaptive_k(std::vector<double>{0.1, 0.11, 0.12, 0.9, 0.95}) == 3);
    CHECK(adaptive_k(std::vector<double>{1, 2, 3, 4}) == 1);
    CHECK(adaptive_k(std::vector<double>{2.5}) == 1);
    CHECK(adaptive_k(std::vector<double>{}) == 1);
}

TEST_CASE("prior_weight") {
    const ClassPriors half = ClassPriors::from_classes({0, 1, 0, 1});
    CHECK(prior_weight(0, 0, half) == -1.0);
    CHECK(prior_weight(1, 0, half) == 1.0);
    const ClassPriors p = ClassPriors::from_classes({0, 1, 2, 2});
    CHECK(prior_weight(2, 0, p) == doctest::Approx(2.0 / 3.0));
    CHECK_ERROR(prior_weight(0, 0, ClassPriors::from_classes({0, 0})), SingleClass);
}

TEST_CASE("absMean update cases") {
    const SparseMatrix rows = SparseMatrix::from_dense({{1, 2, 3}, {0, 2, 4}, {2, 2, 2}, {5, -1, 0}});
    std::vector<double> w(3, 0.0);
    // Row 0 equals the mean of rows 1 and 2.
    update_abs_mean(w, rows.row(0), std::vector<RowView>{rows.row(1), rows.row(2)}, 1.0);
    CHECK(w == std::vector<double>{0, 0, 0});

    std::vector<double> a(3, 0.0), c(3, 0.0);
    update_abs_mean(a, rows.row(0), std::vector<RowView>{rows.row(3)}, 0.5);
    update_classic(c, rows.row(0), std::vector<RowView>{rows.row(3)}, 0.5);
    CHECK(a == c);

    std::vector<double> m(3, 0.0), cl(3, 0.0);
    const std::vector<RowView> three{rows.row(1), rows.row(2), rows.row(3)};
    update_abs_mean(m, rows.row(0), three, 1.0);
    update_classic(cl, rows.row(0), three, 1.0);
    const double oracle[3] = {std::abs(1 - 7.0 / 3), std::abs(2 - 3.0 / 3), std::abs(3 - 6.0 / 3)};
    for (std::size_t j = 0; j < 3; ++j) {
        CHECK(m[j] == doctest::Approx(oracle[j]).epsilon(1e-12));
        CHECK(cl[j] >= m[j]);
    }
    CHECK_ERROR(update_abs_mean(m, rows.row(0), std::vector<RowView>{}, 1.0), EmptyNeighborhood);
}

TEST_CASE("classic update matches the per-feature ReliefF contribution") {
    const SparseMatrix x = random_sparse(6, 8, 0.5, 70);
    const auto d = x.to_dense();
    std::vector<RowView> ns{x.row(1), x.row(2), x.row(3), x.row(4)};
    std::vector<double> w(8, 0.25);
    update_classic(w, x.row(0), ns, -1.0);
    for (std::size_t j = 0; j < 8; ++j) {
        double s = 0.0;
        for (std::size_t q = 1; q <= 4; ++q) s += std::abs(d[j] - d[q * 8 + j]);
        CHECK(std::abs(w[j] - (0.25 - s / 4.0)) <= 1e-12);
    }
    std::vector<double> z(8, 0.0);
    update_classic(z, x.row(5), std::vector<RowView>{x.row(5), x.row(5)}, 1.0);
    CHECK(z == std::vector<double>(8, 0.0));
}

TEST_CASE("single informative feature is ranked first") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        Rng rng = test_rng(71 + seed);
        const std::size_t n = 200, f = 10;
        std::vector<double> v(n * f);
        ClassVector y(n);
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = i % 2;
            for (std::size_t j = 0; j < f; ++j) v[i * f + j] = uniform01(rng);
            v[i * f] = static_cast<double>(y[i]) + 0.1 * uniform01(rng);
        }
        RankingConfig cfg;
        cfg.seed = seed;
        const RankResult r = rank_mcc({SparseMatrix::from_dense(n, f, v), y}, cfg);
        CHECK(r.weights.ranking().front() == 0);
    }
}

TEST_CASE("constant features get zero weight") {
    const SparseMatrix x = SparseMatrix::from_dense(20, 4, std::vector<double>(80, 3.0));
    ClassVector y(20);
    for (std::size_t i = 0; i < 20; ++i) y[i] = i % 3;
    RankingConfig cfg;
    cfg.sparsify_enabled = false;
    CHECK(rank_mcc({x, y}, cfg).weights.weights == std::vector<double>(4, 0.0));
}

TEST_CASE("serial ranking is bitwise reproducible; parallel matches within rounding") {
    const Dataset ds = mcc_informative(150, 3, 7, 1.5, 72);
    RankingConfig cfg;
    cfg.seed = 5;
    cfg.adaptive_threshold = true;
    cfg.abs_mean_update = true;
    const auto a = rank_mcc(ds, cfg).weights.weights;
    CHECK(a == rank_mcc(ds, cfg).weights.weights);
    cfg.serial = false;
    cfg.threads = 4;
    const auto b = rank_mcc(ds, cfg).weights.weights;
    for (std::size_t j = 0; j < a.size(); ++j) CHECK(b[j] == doctest::Approx(a[j]).epsilon(1e-9));
}

TEST_CASE("embedded ranking reports its dimension and records k") {
    const Dataset ds = mcc_informative(120, 3, 5, 2.0, 73);
    RankingConfig cfg;
    cfg.use_embedding = true;
    cfg.embedding.n_epochs = 30;
    cfg.adaptive_threshold = true;
    cfg.record_k = true;
    cfg.iterations = 25;
    const RankResult r = rank_mcc(ds, cfg);
    CHECK(r.embedding_dim >= 1);
    CHECK(r.selected_k.size() == 25 * 2);
    for (std::size_t k : r.selected_k) CHECK(k >= 1);
    CHECK(r.sparsified);
    CHECK(r.epsilon.has_value());
}

TEST_CASE("one tight cluster per class gives small adaptive k") {
    std::vector<double> a(10, 0.0), b(10, 0.0);
    b[0] = 20.0;
    const Dataset ds = blobs({a, b}, 30, 0.5, 74);
    RankingConfig cfg;
    cfg.adaptive_threshold = true;
    cfg.record_k = true;
    cfg.iterations = 60;
    cfg.sparsify_enabled = false;
    auto ks = rank_mcc(ds, cfg).selected_k;
    std::sort(ks.begin(), ks.end());
    CHECK(ks[ks.size() / 2] <= 5);
}

TEST_CASE("errors") {
    const SparseMatrix x = SparseMatrix::from_dense({{1, 2}, {3, 4}});
    CHECK_ERROR(rank_mcc({x, ClassVector{0, 0}}, {}), SingleClass);
    CHECK_ERROR(rank_mcc({x, ClassVector{0}}, {}), InvalidShape);
    RankingConfig bad;
    bad.k_neighbors = 0;
    CHECK_ERROR(rank_mcc({x, ClassVector{0, 1}}, bad), InvalidConfig);
    // Each class has a single member: hits have no candidates and are skipped.
    const RankResult r = rank_mcc({x, ClassVector{0, 1}}, {});
    CHECK(r.skipped_updates == 2);
}
