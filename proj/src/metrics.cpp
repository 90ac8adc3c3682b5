#include "ginidebias/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "ginidebias/errors.hpp"

namespace ginidebias::metrics {

namespace {

void check_accuracies(const std::vector<double>& accuracies) {
    if (accuracies.empty()) {
        throw DataError("accuracy vector must hold at least one class");
    }
    for (std::size_t i = 0; i < accuracies.size(); ++i) {
        const double a = accuracies[i];
        if (!(a >= 0.0 && a <= 1.0)) {
            throw DataError(fmt::format("accuracy of class {} is {}, outside [0, 1]", i, a));
        }
    }
}

}  // namespace

ClassAccuracyVector::ClassAccuracyVector(std::vector<double> accuracies)
    : accuracies_(std::move(accuracies)) {
    check_accuracies(accuracies_);
}

ClassAccuracyVector::ClassAccuracyVector(std::vector<double> accuracies,
                                         std::vector<std::size_t> supports)
    : accuracies_(std::move(accuracies)), supports_(std::move(supports)) {
    check_accuracies(accuracies_);
    if (supports_->size() != accuracies_.size()) {
        throw DataError(fmt::format("{} supports given for {} accuracies", supports_->size(),
                                    accuracies_.size()));
    }
}

std::span<const std::size_t> ClassAccuracyVector::supports() const noexcept {
    if (!supports_) return {};
    return *supports_;
}

bool ClassAccuracyVector::has_unsupported_class() const noexcept {
    return supports_ && std::ranges::find(*supports_, std::size_t{0}) != supports_->end();
}

void ClassAccuracyVector::set_class_names(std::vector<std::string> names) {
    if (!names.empty() && names.size() != accuracies_.size()) {
        throw DataError(fmt::format("{} class names given for {} classes", names.size(),
                                    accuracies_.size()));
    }
    class_names_ = std::move(names);
}

double mean_accuracy(const ClassAccuracyVector& acc) {
    const auto values = acc.accuracies();
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

std::optional<double> gini(const ClassAccuracyVector& acc) {
    const double mean = mean_accuracy(acc);
    if (mean == 0.0) return std::nullopt;

    const auto values = acc.accuracies();
    double total = 0.0;
    for (const double a : values) {
        for (const double b : values) {
            total += std::abs(a - b);
        }
    }
    const auto n = static_cast<double>(values.size());
    // Rounding can land an ulp past (N-1)/N for single-nonzero vectors.
    return std::min(total / (2.0 * n * n * mean), (n - 1.0) / n);
}

double cobias(const ClassAccuracyVector& acc) {
    const auto values = acc.accuracies();
    const std::size_t n = values.size();
    if (n < 2) {
        throw DataError("COBias needs at least two classes");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            total += std::abs(values[i] - values[j]);
        }
    }
    return 2.0 * total / (static_cast<double>(n) * static_cast<double>(n - 1));
}

double gini_from_cobias(double cobias_value, double mean_acc, std::size_t n) {
    if (!(mean_acc > 0.0)) {
        throw DataError(fmt::format("mean accuracy must be positive, got {}", mean_acc));
    }
    if (n < 2) {
        throw DataError("Gini/COBias relation needs at least two classes");
    }
    const auto nd = static_cast<double>(n);
    return (nd - 1.0) / (2.0 * nd * mean_acc) * cobias_value;
}

std::optional<double> top_class_dominance(const ClassAccuracyVector& acc) {
    const double mean = mean_accuracy(acc);
    if (mean == 0.0) return std::nullopt;
    return std::ranges::max(acc.accuracies()) / mean;
}

double max_gini_bound(std::size_t n) {
    if (n < 1) {
        throw DataError("class count must be at least 1");
    }
    const auto nd = static_cast<double>(n);
    return (nd - 1.0) / nd;
}

MetricsReport partial_metrics_report(const ClassAccuracyVector& acc) {
    if (acc.has_unsupported_class()) {
        throw DataError("accuracy vector contains a class with zero support");
    }
    MetricsReport report;
    report.mean_accuracy = mean_accuracy(acc);
    report.gini = gini(acc);
    if (acc.size() >= 2) report.cobias = cobias(acc);
    report.top_class_dominance = top_class_dominance(acc);
    report.max_gini_bound = max_gini_bound(acc.size());
    report.per_class = acc;
    return report;
}

MetricsReport metrics_report(const ClassAccuracyVector& acc) {
    if (acc.size() < 2) {
        throw DataError("a metrics report needs at least two classes");
    }
    return partial_metrics_report(acc);
}

}  // namespace ginidebias::metrics
