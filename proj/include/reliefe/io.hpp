#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "reliefe/dataset.hpp"
#include "reliefe/sparse.hpp"

namespace reliefe {

/// Rows of a feature file plus the raw per-row label column (if any).
struct LabeledMatrix {
    SparseMatrix features;
    std::vector<double> labels;
};

/// `label idx:val ...` with 1-based indices; `#` starts a comment and
/// `qid:` tokens are skipped. The column count is the larger of the highest
/// index seen and `n_features`.
LabeledMatrix read_svmlight(std::istream& in, std::optional<std::size_t> n_features = {});
void write_svmlight(std::ostream& out, const SparseMatrix& x, const std::vector<double>& labels);

struct CsvOptions {
    bool header = false;
    /// Column holding the label; negative counts from the end (-1 = last).
    /// Unset means every column is a feature.
    std::optional<long> label_column;
};

LabeledMatrix read_csv(std::istream& in, const CsvOptions& options = {});
/// Writes features (and the label as the last column when labels is
/// non-empty). With header, columns are named f0..f{n-1}[,label].
void write_csv(std::ostream& out, const SparseMatrix& x, const std::vector<double>& labels = {},
               bool header = false);

/// One comma-separated list of 0-based label indices per line; a blank line
/// is an instance without labels.
SparseMatrix read_label_lists(std::istream& in, std::optional<std::size_t> n_labels = {});
void write_label_lists(std::ostream& out, const SparseMatrix& labels);

/// Maps raw class labels to ids. Non-negative integers are kept as is;
/// otherwise the distinct values are numbered in ascending order.
ClassVector to_class_ids(const std::vector<double>& labels);

enum class FileFormat { svmlight, csv };

FileFormat parse_format(const std::string& name);

struct LoadOptions {
    std::filesystem::path path;
    FileFormat format = FileFormat::svmlight;
    /// Label-list file for multi-label data.
    std::optional<std::filesystem::path> target_path;
    Task task = Task::mcc;
    CsvOptions csv{false, -1};
    std::optional<std::size_t> n_features;
    std::optional<std::size_t> n_labels;
};

Dataset load_dataset(const LoadOptions& options);

/// FNV-1a over the CSR arrays of features and targets.
std::string fingerprint(const Dataset& dataset);

}  // namespace reliefe
