#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "reliefe/sparse.hpp"

namespace reliefe {

enum class Task { mcc, mlc };

/// One class id per instance (multi-class).
using ClassVector = std::vector<std::size_t>;
/// Multi-class class vector or multi-label binary label matrix.
using Targets = std::variant<ClassVector, SparseMatrix>;

struct Dataset {
    SparseMatrix features;
    Targets targets;

    Task task() const noexcept { return std::holds_alternative<ClassVector>(targets) ? Task::mcc : Task::mlc; }
    std::size_t n_instances() const noexcept { return features.n_rows(); }
    std::size_t n_features() const noexcept { return features.n_cols(); }
    const ClassVector& classes() const { return std::get<ClassVector>(targets); }
    const SparseMatrix& labels() const { return std::get<SparseMatrix>(targets); }

    /// Throws InvalidShape when the target count differs from the row count.
    void validate() const;
};

std::size_t n_targets(const Targets& targets) noexcept;
/// Number of classes (max id + 1).
std::size_t class_count(const ClassVector& classes) noexcept;

}  // namespace reliefe
