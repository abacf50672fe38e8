#include <doctest.h>

#include <cmath>
#include <numeric>

#include "reliefe/intrinsic_dim.hpp"
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
}  // namespace

TEST_CASE("empirical_cdf uses strict inequality") {
    CHECK(empirical_cdf(std::vector<double>{1, 2, 3}) == std::vector<double>{0, 1.0 / 3, 2.0 / 3});
    CHECK(empirical_cdf(std::vector<double>{4, 4, 4}) == std::vector<double>{0, 0, 0});
    const auto v = gaussian_values(300, 20);
    const auto cdf = empirical_cdf(v);
    for (std::size_t i = 0; i < v.size(); ++i) {
        std::size_t below = 0;
        for (double x : v) below += x < v[i];
        CHECK(cdf[i] == static_cast<double>(below) / 300.0);
    }
}

TEST_CASE("line segment has dimension one") {
    const SparseMatrix x = hypercube(2048, 1, 21);
    CHECK(estimate_dimension(x, all_rows(2048)).d == 1);
}

TEST_CASE("5-D hypercube") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto est = estimate_dimension(hypercube(2048, 5, 30 + seed), all_rows(2048));
        CHECK(est.d >= 4);
        CHECK(est.d <= 6);
    }
}

TEST_CASE("ratios agree with a brute-force TWO-NN computation") {
    const SparseMatrix x = hypercube(60, 3, 22);
    const auto dense = x.to_dense();
    const auto est = estimate_dimension(x, all_rows(60));
    REQUIRE(est.mu.size() == 60);
    for (std::size_t i = 0; i < 60; ++i) {
        std::vector<double> d;
        for (std::size_t j = 0; j < 60; ++j) {
            double s = 0.0;
            for (std::size_t c = 0; c < 3; ++c) s += (dense[i * 3 + c] - dense[j * 3 + c]) * (dense[i * 3 + c] - dense[j * 3 + c]);
            if (s > 0.0) d.push_back(std::sqrt(s));
        }
        std::sort(d.begin(), d.end());
        CHECK(est.mu[i] == doctest::Approx(d[1] / d[0]).epsilon(1e-12));
        CHECK(est.mu[i] >= 1.0);
    }
    // Fit excludes the largest 10% of ratios.
    CHECK(est.fitted.size() <= 60 - 6);
}

TEST_CASE("scale invariance and duplicate robustness") {
    const SparseMatrix x = hypercube(400, 3, 23);
    auto scaled_vals = x.to_dense();
    for (double& v : scaled_vals) v *= 1000.0;
    const auto a = estimate_dimension(x, all_rows(400));
    const auto b = estimate_dimension(SparseMatrix::from_dense(400, 3, scaled_vals), all_rows(400));
    CHECK(a.d == b.d);

    std::vector<double> dup = x.to_dense();
    dup.insert(dup.end(), dup.begin(), dup.begin() + 3 * 50);
    const auto c = estimate_dimension(SparseMatrix::from_dense(450, 3, dup), all_rows(450));
    for (double m : c.mu) CHECK(std::isfinite(m));
}

TEST_CASE("errors") {
    CHECK_ERROR(estimate_dimension(hypercube(10, 2, 24), std::vector<std::size_t>{0, 1}), InvalidShape);
    // All rows identical: no positive-distance neighbors.
    const SparseMatrix same = SparseMatrix::from_dense(5, 2, std::vector<double>(10, 1.0));
    CHECK_ERROR(estimate_dimension(same, all_rows(5)), DegenerateGeometry);
}

TEST_CASE("multiplier scales the slope before rounding") {
    const SparseMatrix x = hypercube(1000, 4, 25);
    DimOptions twice;
    twice.dim_multiplier = 2.0;
    const auto a = estimate_dimension(x, all_rows(1000));
    const auto b = estimate_dimension(x, all_rows(1000), twice);
    CHECK(b.d == static_cast<std::size_t>(std::lround(2.0 * a.slope)));
}
