#pragma once

// Independent reference computations for the tests. Nothing here calls into
// the library's metric or correction code.

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <random>
#include <vector>

namespace oracle {

/// Gini via the sorted (Lorenz-curve) form:
/// sum_i (2i - n - 1) x_(i) / (n * sum x), with i 1-based over ascending x.
inline double gini_sorted(std::vector<double> x) {
    std::sort(x.begin(), x.end());
    const auto n = static_cast<double>(x.size());
    double weighted = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        weighted += (2.0 * static_cast<double>(i + 1) - n - 1.0) * x[i];
    }
    return weighted / (n * std::accumulate(x.begin(), x.end(), 0.0));
}

/// COBias via the sorted form: sum_{i<j} |x_i - x_j| = sum_i (2i - n - 1) x_(i).
inline double cobias_sorted(std::vector<double> x) {
    std::sort(x.begin(), x.end());
    const auto n = static_cast<double>(x.size());
    double weighted = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        weighted += (2.0 * static_cast<double>(i + 1) - n - 1.0) * x[i];
    }
    return 2.0 * weighted / (n * (n - 1.0));
}

/// Random accuracy vector of length n with at least one positive entry.
inline std::vector<double> random_accuracies(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::bernoulli_distribution zero(0.15);
    std::vector<double> acc(n);
    for (auto& a : acc) a = zero(rng) ? 0.0 : unit(rng);
    if (std::all_of(acc.begin(), acc.end(), [](double a) { return a == 0.0; })) acc[0] = 0.5;
    return acc;
}

/// Plain per-class accuracy from predictions and labels.
inline std::vector<double> class_accuracy(const std::vector<std::size_t>& labels,
                                          const std::vector<std::size_t>& predictions, std::size_t n) {
    std::vector<double> hit(n, 0.0);
    std::vector<double> total(n, 0.0);
    for (std::size_t m = 0; m < labels.size(); ++m) {
        total[labels[m]] += 1.0;
        if (labels[m] == predictions[m]) hit[labels[m]] += 1.0;
    }
    for (std::size_t i = 0; i < n; ++i) hit[i] = total[i] > 0 ? hit[i] / total[i] : 0.0;
    return hit;
}

}  // namespace oracle
