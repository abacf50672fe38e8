#include "reliefe/dataset.hpp"

#include <algorithm>

#include "reliefe/error.hpp"

namespace reliefe {

std::size_t n_targets(const Targets& targets) noexcept {
    return std::visit(
        [](const auto& t) -> std::size_t {
            if constexpr (std::is_same_v<std::decay_t<decltype(t)>, ClassVector>) {
                return t.size();
            } else {
                return t.n_rows();
            }
        },
        targets);
}

std::size_t class_count(const ClassVector& classes) noexcept {
    return classes.empty() ? 0 : *std::max_element(classes.begin(), classes.end()) + 1;
}

void Dataset::validate() const {
    if (n_targets(targets) != features.n_rows())
        throw Error(ErrorKind::InvalidShape, "target count does not match instance count");
    if (task() == Task::mlc) {
        for (double v : labels().values())
            if (v != 1.0) throw Error(ErrorKind::InvalidLabelRow, "label matrix must be binary");
    }
}

}  // namespace reliefe
