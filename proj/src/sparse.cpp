#include "reliefe/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "reliefe/error.hpp"

namespace reliefe {

SparseMatrix::SparseMatrix(std::size_t n_rows, std::size_t n_cols,
                           std::vector<std::size_t> row_offsets, std::vector<Index> col_indices,
                           std::vector<double> values)
    : n_rows_(n_rows),
      n_cols_(n_cols),
      offsets_(std::move(row_offsets)),
      cols_(std::move(col_indices)),
      values_(std::move(values)) {
    if (offsets_.size() != n_rows_ + 1 || offsets_.front() != 0 ||
        offsets_.back() != values_.size() || cols_.size() != values_.size()) {
        throw Error(ErrorKind::InvalidShape, "inconsistent CSR array lengths");
    }
    for (std::size_t i = 0; i < n_rows_; ++i) {
        const std::size_t b = offsets_[i], e = offsets_[i + 1];
        if (e < b) throw Error(ErrorKind::InvalidShape, "row offsets decrease at row " + std::to_string(i));
        for (std::size_t p = b; p < e; ++p) {
            if (cols_[p] >= n_cols_)
                throw Error(ErrorKind::InvalidShape, "column index out of range in row " + std::to_string(i));
            if (p > b && cols_[p] <= cols_[p - 1])
                throw Error(ErrorKind::InvalidShape, "column indices not increasing in row " + std::to_string(i));
            if (values_[p] == 0.0) throw Error(ErrorKind::InvalidValue, "explicit zero stored");
            if (!std::isfinite(values_[p])) throw Error(ErrorKind::InvalidValue, "non-finite value stored");
        }
    }
}

SparseMatrix SparseMatrix::zeros(std::size_t n_rows, std::size_t n_cols) {
    return SparseMatrix(n_rows, n_cols, std::vector<std::size_t>(n_rows + 1, 0), {}, {});
}

SparseMatrix SparseMatrix::from_dense(std::size_t n_rows, std::size_t n_cols,
                                      std::span<const double> row_major) {
    if (row_major.size() != n_rows * n_cols)
        throw Error(ErrorKind::InvalidShape, "dense buffer size does not match shape");
    SparseBuilder builder(n_cols);
    for (std::size_t i = 0; i < n_rows; ++i) {
        for (std::size_t j = 0; j < n_cols; ++j) {
            const double v = row_major[i * n_cols + j];
            if (!std::isfinite(v))
                throw Error(ErrorKind::InvalidValue,
                            "non-finite entry at (" + std::to_string(i) + ", " + std::to_string(j) + ")");
            builder.push(static_cast<Index>(j), v);
        }
        builder.finish_row();
    }
    return std::move(builder).build();
}

SparseMatrix SparseMatrix::from_dense(const std::vector<std::vector<double>>& rows) {
    const std::size_t n_cols = rows.empty() ? 0 : rows.front().size();
    std::vector<double> flat;
    flat.reserve(rows.size() * n_cols);
    for (const auto& r : rows) {
        if (r.size() != n_cols) throw Error(ErrorKind::InvalidShape, "ragged dense rows");
        flat.insert(flat.end(), r.begin(), r.end());
    }
    return from_dense(rows.size(), n_cols, flat);
}

SparseMatrix SparseMatrix::from_dense(const DenseMatrix& dense) {
    return from_dense(dense.n_rows, dense.n_cols, dense.data);
}

double SparseMatrix::at(std::size_t i, std::size_t j) const {
    const RowView r = row(i);
    const auto it = std::lower_bound(r.cols.begin(), r.cols.end(), static_cast<Index>(j));
    if (it == r.cols.end() || *it != j) return 0.0;
    return r.vals[static_cast<std::size_t>(it - r.cols.begin())];
}

std::vector<double> SparseMatrix::to_dense() const {
    std::vector<double> out(n_rows_ * n_cols_, 0.0);
    for (std::size_t i = 0; i < n_rows_; ++i)
        for (std::size_t p = offsets_[i]; p < offsets_[i + 1]; ++p) out[i * n_cols_ + cols_[p]] = values_[p];
    return out;
}

DenseMatrix SparseMatrix::to_dense_matrix() const {
    DenseMatrix d;
    d.n_rows = n_rows_;
    d.n_cols = n_cols_;
    d.data = to_dense();
    return d;
}

SparseMatrix SparseMatrix::transpose() const {
    std::vector<std::size_t> offsets(n_cols_ + 1, 0);
    for (Index c : cols_) ++offsets[c + 1];
    std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
    std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
    std::vector<Index> cols(nnz());
    std::vector<double> vals(nnz());
    for (std::size_t i = 0; i < n_rows_; ++i) {
        for (std::size_t p = offsets_[i]; p < offsets_[i + 1]; ++p) {
            const std::size_t dst = cursor[cols_[p]]++;
            cols[dst] = static_cast<Index>(i);
            vals[dst] = values_[p];
        }
    }
    return SparseMatrix(n_cols_, n_rows_, std::move(offsets), std::move(cols), std::move(vals));
}

SparseMatrix SparseMatrix::select_rows(std::span<const std::size_t> rows) const {
    SparseBuilder builder(n_cols_);
    for (std::size_t i : rows) {
        if (i >= n_rows_) throw Error(ErrorKind::InvalidShape, "row index out of range");
        const RowView r = row(i);
        for (std::size_t p = 0; p < r.nnz(); ++p) builder.push(r.cols[p], r.vals[p]);
        builder.finish_row();
    }
    return std::move(builder).build();
}

SparseMatrix SparseMatrix::select_cols(std::span<const std::size_t> cols) const {
    constexpr Index absent = ~Index{0};
    std::vector<Index> remap(n_cols_, absent);
    for (std::size_t c = 0; c < cols.size(); ++c) {
        if (cols[c] >= n_cols_) throw Error(ErrorKind::InvalidShape, "column index out of range");
        remap[cols[c]] = static_cast<Index>(c);
    }
    SparseBuilder builder(cols.size());
    std::vector<std::pair<Index, double>> scratch;
    for (std::size_t i = 0; i < n_rows_; ++i) {
        scratch.clear();
        const RowView r = row(i);
        for (std::size_t p = 0; p < r.nnz(); ++p)
            if (remap[r.cols[p]] != absent) scratch.emplace_back(remap[r.cols[p]], r.vals[p]);
        std::sort(scratch.begin(), scratch.end());
        for (const auto& [c, v] : scratch) builder.push(c, v);
        builder.finish_row();
    }
    return std::move(builder).build();
}

void SparseBuilder::reserve(std::size_t rows, std::size_t nnz) {
    offsets_.reserve(rows + 1);
    cols_.reserve(nnz);
    values_.reserve(nnz);
}

void SparseBuilder::push(Index col, double value) {
    if (value == 0.0) return;
    cols_.push_back(col);
    values_.push_back(value);
}

void SparseBuilder::finish_row() { offsets_.push_back(values_.size()); }

SparseMatrix SparseBuilder::build() && {
    const std::size_t rows = offsets_.size() - 1;
    return SparseMatrix(rows, n_cols_, std::move(offsets_), std::move(cols_), std::move(values_));
}

std::string_view to_string(DistanceMetric metric) noexcept {
    return metric == DistanceMetric::euclidean ? "euclidean" : "cosine";
}

DistanceMetric parse_metric(std::string_view name) {
    if (name == "euclidean") return DistanceMetric::euclidean;
    if (name == "cosine") return DistanceMetric::cosine;
    throw Error(ErrorKind::InvalidConfig, "unknown metric '" + std::string(name) + "'");
}

double density(const SparseMatrix& x) {
    const double cells = static_cast<double>(x.n_rows()) * static_cast<double>(x.n_cols());
    if (cells == 0.0) throw Error(ErrorKind::InvalidShape, "density of an empty shape");
    return static_cast<double>(x.nnz()) / cells;
}

double squared_norm(RowView r) noexcept {
    double s = 0.0;
    for (double v : r.vals) s += v * v;
    return s;
}

double dot(RowView a, RowView b) noexcept {
    double s = 0.0;
    std::size_t p = 0, q = 0;
    while (p < a.nnz() && q < b.nnz()) {
        if (a.cols[p] < b.cols[q]) {
            ++p;
        } else if (b.cols[q] < a.cols[p]) {
            ++q;
        } else {
            s += a.vals[p++] * b.vals[q++];
        }
    }
    return s;
}

double squared_euclidean(RowView a, RowView b) noexcept {
    double s = 0.0;
    std::size_t p = 0, q = 0;
    while (p < a.nnz() || q < b.nnz()) {
        double diff;
        if (q == b.nnz() || (p < a.nnz() && a.cols[p] < b.cols[q])) {
            diff = a.vals[p++];
        } else if (p == a.nnz() || b.cols[q] < a.cols[p]) {
            diff = -b.vals[q++];
        } else {
            diff = a.vals[p++] - b.vals[q++];
        }
        s += diff * diff;
    }
    return s;
}

namespace {

double cosine_from_parts(double ab, double aa, double bb) {
    if (aa == 0.0 || bb == 0.0) throw Error(ErrorKind::DegenerateRow, "cosine distance on a zero-norm row");
    return std::max(0.0, 1.0 - ab / std::sqrt(aa * bb));
}

}  // namespace

double distance(RowView a, RowView b, DistanceMetric metric) {
    if (metric == DistanceMetric::euclidean) return std::sqrt(squared_euclidean(a, b));
    return cosine_from_parts(dot(a, b), squared_norm(a), squared_norm(b));
}

std::vector<double> row_distances(const SparseMatrix& x, std::size_t i, DistanceMetric metric,
                                  std::optional<std::span<const std::size_t>> row_subset) {
    if (i >= x.n_rows()) throw Error(ErrorKind::InvalidShape, "row index out of range");
    const RowView ri = x.row(i);
    const double norm_i = metric == DistanceMetric::cosine ? squared_norm(ri) : 0.0;
    auto one = [&](std::size_t j) {
        if (j >= x.n_rows()) throw Error(ErrorKind::InvalidShape, "subset row index out of range");
        const RowView rj = x.row(j);
        if (metric == DistanceMetric::euclidean) return std::sqrt(squared_euclidean(ri, rj));
        return cosine_from_parts(dot(ri, rj), norm_i, squared_norm(rj));
    };
    std::vector<double> out;
    if (row_subset) {
        out.reserve(row_subset->size());
        for (std::size_t j : *row_subset) out.push_back(one(j));
    } else {
        out.reserve(x.n_rows());
        for (std::size_t j = 0; j < x.n_rows(); ++j) out.push_back(one(j));
    }
    return out;
}

std::vector<double> row_distances(const DenseMatrix& x, std::size_t i, DistanceMetric metric,
                                  std::optional<std::span<const std::size_t>> row_subset) {
    if (i >= x.n_rows) throw Error(ErrorKind::InvalidShape, "row index out of range");
    const std::span<const double> ri = x.row(i);
    double norm_i = 0.0;
    if (metric == DistanceMetric::cosine)
        for (double v : ri) norm_i += v * v;
    auto one = [&](std::size_t j) {
        if (j >= x.n_rows) throw Error(ErrorKind::InvalidShape, "subset row index out of range");
        const std::span<const double> rj = x.row(j);
        if (metric == DistanceMetric::euclidean) {
            double s = 0.0;
            for (std::size_t c = 0; c < ri.size(); ++c) {
                if (ri[c] == 0.0 && rj[c] == 0.0) continue;
                const double d = ri[c] - rj[c];
                s += d * d;
            }
            return std::sqrt(s);
        }
        double ab = 0.0, bb = 0.0;
        for (std::size_t c = 0; c < ri.size(); ++c) {
            ab += ri[c] * rj[c];
            bb += rj[c] * rj[c];
        }
        return cosine_from_parts(ab, norm_i, bb);
    };
    std::vector<double> out;
    if (row_subset) {
        out.reserve(row_subset->size());
        for (std::size_t j : *row_subset) out.push_back(one(j));
    } else {
        out.reserve(x.n_rows);
        for (std::size_t j = 0; j < x.n_rows; ++j) out.push_back(one(j));
    }
    return out;
}

std::vector<std::size_t> argsort_ascending(std::span<const double> v) {
    for (double x : v)
        if (std::isnan(x)) throw Error(ErrorKind::InvalidValue, "NaN in argsort input");
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    return idx;
}

}  // namespace reliefe
