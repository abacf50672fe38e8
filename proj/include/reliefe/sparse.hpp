#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace reliefe {

using Index = std::uint32_t;

/// Read-only view of one CSR row.
struct RowView {
    std::span<const Index> cols;
    std::span<const double> vals;

    std::size_t nnz() const noexcept { return cols.size(); }
};

/// Row-major dense grid. Used for layout coordinates and small oracles.
struct DenseMatrix {
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;
    std::vector<double> data;

    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : n_rows(rows), n_cols(cols), data(rows * cols, fill) {}

    std::span<double> row(std::size_t i) { return {data.data() + i * n_cols, n_cols}; }
    std::span<const double> row(std::size_t i) const { return {data.data() + i * n_cols, n_cols}; }
    double& operator()(std::size_t i, std::size_t j) { return data[i * n_cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * n_cols + j]; }
};

/**
 * Compressed sparse-row real matrix.
 *
 * Invariants checked on construction: offsets start at 0, are non-decreasing
 * and end at nnz; column indices are strictly increasing within a row and
 * below n_cols; no stored value is zero or non-finite. Immutable afterwards,
 * so instances can be shared freely between threads.
 */
class SparseMatrix {
public:
    SparseMatrix() : offsets_(1, 0) {}
    SparseMatrix(std::size_t n_rows, std::size_t n_cols, std::vector<std::size_t> row_offsets,
                 std::vector<Index> col_indices, std::vector<double> values);

    static SparseMatrix zeros(std::size_t n_rows, std::size_t n_cols);
    static SparseMatrix from_dense(std::size_t n_rows, std::size_t n_cols,
                                   std::span<const double> row_major);
    static SparseMatrix from_dense(const std::vector<std::vector<double>>& rows);
    static SparseMatrix from_dense(const DenseMatrix& dense);

    std::size_t n_rows() const noexcept { return n_rows_; }
    std::size_t n_cols() const noexcept { return n_cols_; }
    std::size_t nnz() const noexcept { return values_.size(); }

    const std::vector<std::size_t>& row_offsets() const noexcept { return offsets_; }
    const std::vector<Index>& col_indices() const noexcept { return cols_; }
    const std::vector<double>& values() const noexcept { return values_; }

    RowView row(std::size_t i) const noexcept {
        const std::size_t b = offsets_[i], e = offsets_[i + 1];
        return {std::span<const Index>(cols_.data() + b, e - b),
                std::span<const double>(values_.data() + b, e - b)};
    }

    /// Entry lookup by binary search within the row.
    double at(std::size_t i, std::size_t j) const;

    std::vector<double> to_dense() const;
    DenseMatrix to_dense_matrix() const;
    SparseMatrix transpose() const;
    SparseMatrix select_rows(std::span<const std::size_t> rows) const;
    /// Keeps the given columns in the given order (column c of the result is
    /// column cols[c] of this matrix).
    SparseMatrix select_cols(std::span<const std::size_t> cols) const;

    /// Bytes held by the three CSR arrays.
    std::size_t footprint_bytes() const noexcept {
        return offsets_.size() * sizeof(std::size_t) + cols_.size() * sizeof(Index) +
               values_.size() * sizeof(double);
    }

    friend bool operator==(const SparseMatrix&, const SparseMatrix&) = default;

private:
    std::size_t n_rows_ = 0;
    std::size_t n_cols_ = 0;
    std::vector<std::size_t> offsets_;
    std::vector<Index> cols_;
    std::vector<double> values_;
};

/// Incremental CSR construction, one row at a time. Zeros pushed are dropped.
class SparseBuilder {
public:
    explicit SparseBuilder(std::size_t n_cols) : n_cols_(n_cols), offsets_(1, 0) {}

    void reserve(std::size_t rows, std::size_t nnz);
    /// Columns must be pushed in strictly increasing order within a row.
    void push(Index col, double value);
    void finish_row();
    std::size_t rows() const noexcept { return offsets_.size() - 1; }
    SparseMatrix build() &&;

private:
    std::size_t n_cols_;
    std::vector<std::size_t> offsets_;
    std::vector<Index> cols_;
    std::vector<double> values_;
};

enum class DistanceMetric { euclidean, cosine };

std::string_view to_string(DistanceMetric metric) noexcept;
DistanceMetric parse_metric(std::string_view name);

/// nnz / (rows * cols). Throws InvalidShape for an empty shape.
double density(const SparseMatrix& x);

double squared_norm(RowView r) noexcept;
double dot(RowView a, RowView b) noexcept;
/// Σ (a_j - b_j)^2 over the union of supports, accumulated in column order.
double squared_euclidean(RowView a, RowView b) noexcept;

/// δ(a, b). Cosine distance is 1 - cos(a, b) clamped below at zero, and
/// throws DegenerateRow when either row has zero norm.
double distance(RowView a, RowView b, DistanceMetric metric);

/// Distances from row i of X to every row in `row_subset` (all rows when
/// absent), in subset order.
std::vector<double> row_distances(const SparseMatrix& x, std::size_t i, DistanceMetric metric,
                                  std::optional<std::span<const std::size_t>> row_subset = {});

/// Same for the rows of a dense matrix; agrees bitwise with the sparse
/// version on the matrix's CSR form.
std::vector<double> row_distances(const DenseMatrix& x, std::size_t i, DistanceMetric metric,
                                  std::optional<std::span<const std::size_t>> row_subset = {});
/// Stable ascending argsort; ties keep the lower original index first.
std::vector<std::size_t> argsort_ascending(std::span<const double> v);

}  // namespace reliefe
