#include "ginidebias/errors.hpp"

#include <fmt/format.h>

namespace ginidebias {

const char* to_string(LoadErrorCode code) noexcept {
    switch (code) {
        case LoadErrorCode::io: return "io";
        case LoadErrorCode::malformed_row: return "malformed row";
        case LoadErrorCode::inconsistent_classes: return "inconsistent class count";
        case LoadErrorCode::negative_probability: return "negative probability";
        case LoadErrorCode::label_out_of_range: return "label out of range";
        case LoadErrorCode::zero_probability_row: return "all-zero probability row";
    }
    return "unknown";
}

namespace {

std::string format_load_error(LoadErrorCode code, std::optional<std::size_t> row,
                              const std::string& detail) {
    if (row) {
        return fmt::format("row {}: {}: {}", *row, to_string(code), detail);
    }
    return fmt::format("{}: {}", to_string(code), detail);
}

}  // namespace

LoadError::LoadError(LoadErrorCode code, std::optional<std::size_t> row, const std::string& detail)
    : DataError(format_load_error(code, row, detail)), code_(code), row_(row) {}

}  // namespace ginidebias
