#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ginidebias/correction.hpp"
#include "ginidebias/dataset.hpp"
#include "ginidebias/metrics.hpp"

namespace ginidebias::optimizer {

/// Metric minimized over the selection vector.
enum class Objective { gini, cobias };

[[nodiscard]] std::string_view to_string(Objective objective) noexcept;
[[nodiscard]] std::optional<Objective> parse_objective(std::string_view name) noexcept;

/// Simulated annealing schedule. Temperature starts at initial_temperature
/// and is multiplied by cooling_rate after every steps_per_temperature moves;
/// a run stops once it falls below min_temperature or after max_iterations
/// moves. Each restart begins from the all-identity selection.
struct AnnealConfig {
    double initial_temperature = 1.0;
    double cooling_rate = 0.95;
    std::size_t steps_per_temperature = 50;
    double min_temperature = 1e-3;
    std::size_t max_iterations = 20000;  // per restart
    std::size_t restarts = 3;
    std::uint64_t seed = 0;

    /// Throws ConfigError.
    void validate() const;
};

struct TracePoint {
    std::size_t iteration = 0;
    double objective = 0.0;

    friend bool operator==(const TracePoint&, const TracePoint&) = default;
};

struct OptimizationResult {
    correction::SelectionVector best_xi;
    double best_objective = 0.0;
    std::vector<TracePoint> objective_trace;
    std::size_t evaluations = 0;
    double initial_objective = 0.0;

    friend bool operator==(const OptimizationResult&, const OptimizationResult&) = default;
};

/// Default enumeration budget for exhaustive_search.
inline constexpr std::uint64_t kDefaultExhaustiveBudget = 1'000'000;

/// Score of a corrected accuracy vector. An undefined Gini (all accuracies
/// zero) scores 1.0, the worst value.
[[nodiscard]] double score(const metrics::ClassAccuracyVector& acc, Objective objective);

/// Objective of `xi` on `set`, computed through corrected_class_accuracy.
[[nodiscard]] double objective_value(const dataset::LabeledPredictionSet& set,
                                     const correction::SelectionVector& xi,
                                     const correction::CorrectionMap& map, Objective objective);

/// Fast objective evaluation for search: every f(p) is tabulated once, so an
/// evaluation costs one pass of table lookups. Agrees exactly with
/// objective_value.
class ObjectiveEvaluator {
public:
    ObjectiveEvaluator(const dataset::LabeledPredictionSet& set, const correction::CorrectionMap& map,
                       Objective objective);

    [[nodiscard]] std::size_t n_classes() const noexcept { return n_classes_; }
    [[nodiscard]] std::size_t map_size() const noexcept { return map_size_; }

    [[nodiscard]] metrics::ClassAccuracyVector accuracy(const correction::SelectionVector& xi) const;
    [[nodiscard]] double operator()(const correction::SelectionVector& xi) const;

private:
    std::size_t n_classes_;
    std::size_t map_size_;
    Objective objective_;
    std::vector<std::size_t> labels_;
    std::vector<std::size_t> supports_;
    std::vector<double> table_;  // [row][class][function]
};

/// Copy of `xi` with one uniformly chosen class moved to a uniformly chosen
/// different function. Unchanged when the map has a single function.
[[nodiscard]] correction::SelectionVector neighbor(const correction::SelectionVector& xi,
                                                   std::size_t map_size, std::mt19937_64& rng);

[[nodiscard]] OptimizationResult anneal(const dataset::LabeledPredictionSet& set,
                                        const correction::CorrectionMap& map, Objective objective,
                                        const AnnealConfig& config);

/// Enumerates all |F|^N selections. Ties within 1e-12 go to the
/// lexicographically smallest selection. Throws InfeasibleError when the
/// space exceeds `budget`.
[[nodiscard]] OptimizationResult exhaustive_search(const dataset::LabeledPredictionSet& set,
                                                   const correction::CorrectionMap& map,
                                                   Objective objective,
                                                   std::uint64_t budget = kDefaultExhaustiveBudget);

/// Metrics of the corrected predictions on held-out data.
[[nodiscard]] metrics::MetricsReport evaluate_on_test(const dataset::LabeledPredictionSet& test_set,
                                                      const correction::SelectionVector& best_xi,
                                                      const correction::CorrectionMap& map);

void to_json(nlohmann::json& j, const AnnealConfig& config);
/// Keys absent from `j` keep their value from `base`.
[[nodiscard]] AnnealConfig anneal_config_from_json(const nlohmann::json& j, AnnealConfig base = {});

void to_json(nlohmann::json& j, const OptimizationResult& result);

}  // namespace ginidebias::optimizer
