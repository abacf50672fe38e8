#include "reliefe/error.hpp"

namespace reliefe {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidValue: return "InvalidValue";
        case ErrorKind::InvalidShape: return "InvalidShape";
        case ErrorKind::DegenerateRow: return "DegenerateRow";
        case ErrorKind::DegenerateInput: return "DegenerateInput";
        case ErrorKind::DegenerateGeometry: return "DegenerateGeometry";
        case ErrorKind::InsufficientCap: return "InsufficientCap";
        case ErrorKind::InvalidWeight: return "InvalidWeight";
        case ErrorKind::LayoutDiverged: return "LayoutDiverged";
        case ErrorKind::SingleClass: return "SingleClass";
        case ErrorKind::InvalidLabelRow: return "InvalidLabelRow";
        case ErrorKind::EmptyNeighborhood: return "EmptyNeighborhood";
        case ErrorKind::StratificationFailed: return "StratificationFailed";
        case ErrorKind::BaselineDegenerate: return "BaselineDegenerate";
        case ErrorKind::InsufficientPoints: return "InsufficientPoints";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::InvalidConfig: return "InvalidConfig";
    }
    return "Unknown";
}

}  // namespace reliefe
