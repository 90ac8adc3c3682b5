#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace ginidebias {

/// Broad failure category. The CLI maps each category to its own exit code.
enum class ErrorKind {
    data,        // malformed or inconsistent input data
    config,      // invalid parameters or configuration
    infeasible,  // the requested optimization cannot be carried out
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error(ErrorKind::data, what) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};

class InfeasibleError : public Error {
public:
    explicit InfeasibleError(const std::string& what) : Error(ErrorKind::infeasible, what) {}
};

/// Reasons a prediction file can be rejected.
enum class LoadErrorCode {
    io,
    malformed_row,
    inconsistent_classes,
    negative_probability,
    label_out_of_range,
    zero_probability_row,
};

[[nodiscard]] const char* to_string(LoadErrorCode code) noexcept;

/// Rejection of a single input record. `row()` is 1-based and counts data
/// records (the CSV header is not a record); it is empty for file-level faults.
class LoadError : public DataError {
public:
    LoadError(LoadErrorCode code, std::optional<std::size_t> row, const std::string& detail);

    [[nodiscard]] LoadErrorCode code() const noexcept { return code_; }
    [[nodiscard]] std::optional<std::size_t> row() const noexcept { return row_; }

private:
    LoadErrorCode code_;
    std::optional<std::size_t> row_;
};

}  // namespace ginidebias
