#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace reliefe {

enum class ErrorKind {
    InvalidValue,
    InvalidShape,
    DegenerateRow,
    DegenerateInput,
    DegenerateGeometry,
    InsufficientCap,
    InvalidWeight,
    LayoutDiverged,
    SingleClass,
    InvalidLabelRow,
    EmptyNeighborhood,
    StratificationFailed,
    BaselineDegenerate,
    InsufficientPoints,
    ParseError,
    InvalidConfig,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries one of the ErrorKind tags.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace reliefe
