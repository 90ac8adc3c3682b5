#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

// Inequality metrics over per-class accuracy vectors.
//
// Gini = sum_i sum_j |A_i - A_j| / (2 N^2 mean)
// COBias = 2 / (N (N - 1)) * sum_{i<j} |A_i - A_j|
//
// Gini is relative to the mean accuracy (scale invariant), COBias is absolute.
// Every function here is pure.

namespace ginidebias::metrics {

/// Per-class accuracies with the instance counts they were measured on.
///
/// Supports may be unknown (accuracy-only inputs); in that case every class is
/// treated as supported.
class ClassAccuracyVector {
public:
    explicit ClassAccuracyVector(std::vector<double> accuracies);
    ClassAccuracyVector(std::vector<double> accuracies, std::vector<std::size_t> supports);

    [[nodiscard]] std::size_t size() const noexcept { return accuracies_.size(); }
    [[nodiscard]] std::span<const double> accuracies() const noexcept { return accuracies_; }
    [[nodiscard]] double operator[](std::size_t i) const { return accuracies_[i]; }

    [[nodiscard]] bool has_supports() const noexcept { return supports_.has_value(); }
    /// Empty span when supports are unknown.
    [[nodiscard]] std::span<const std::size_t> supports() const noexcept;
    /// True when supports are known and at least one class has none.
    [[nodiscard]] bool has_unsupported_class() const noexcept;

    [[nodiscard]] const std::vector<std::string>& class_names() const noexcept { return class_names_; }
    /// Names are display metadata; must be empty or one per class.
    void set_class_names(std::vector<std::string> names);

    friend bool operator==(const ClassAccuracyVector&, const ClassAccuracyVector&) = default;

private:
    std::vector<double> accuracies_;
    std::optional<std::vector<std::size_t>> supports_;
    std::vector<std::string> class_names_;
};

struct MetricsReport {
    double mean_accuracy = 0.0;
    std::optional<double> gini;  // empty when every accuracy is zero
    std::optional<double> cobias;  // empty only for single-class partial reports
    std::optional<double> top_class_dominance;  // empty when every accuracy is zero
    double max_gini_bound = 0.0;
    ClassAccuracyVector per_class{std::vector<double>{0.0}};
};

[[nodiscard]] double mean_accuracy(const ClassAccuracyVector& acc);

/// Double-sum form. Empty when the mean accuracy is zero.
[[nodiscard]] std::optional<double> gini(const ClassAccuracyVector& acc);

/// Throws DataError for fewer than two classes.
[[nodiscard]] double cobias(const ClassAccuracyVector& acc);

/// Gini recovered from COBias and the mean: (n - 1) / (2 n mean) * cobias.
[[nodiscard]] double gini_from_cobias(double cobias_value, double mean_acc, std::size_t n);

/// max_i A_i / mean. Empty when the mean accuracy is zero.
[[nodiscard]] std::optional<double> top_class_dominance(const ClassAccuracyVector& acc);

/// (n - 1) / n, the Gini of a one-hot vector of length n.
[[nodiscard]] double max_gini_bound(std::size_t n);

/// Full report. Requires at least two classes and no unsupported class.
[[nodiscard]] MetricsReport metrics_report(const ClassAccuracyVector& acc);

/// Report for any N >= 1; COBias is left empty when N == 1.
[[nodiscard]] MetricsReport partial_metrics_report(const ClassAccuracyVector& acc);

}  // namespace ginidebias::metrics
