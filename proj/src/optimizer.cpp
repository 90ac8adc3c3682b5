#include "ginidebias/optimizer.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "ginidebias/errors.hpp"

namespace ginidebias::optimizer {

using correction::CorrectionMap;
using correction::SelectionVector;
using nlohmann::json;

std::string_view to_string(Objective objective) noexcept {
    return objective == Objective::gini ? "gini" : "cobias";
}

std::optional<Objective> parse_objective(std::string_view name) noexcept {
    if (name == "gini") return Objective::gini;
    if (name == "cobias") return Objective::cobias;
    return std::nullopt;
}

void AnnealConfig::validate() const {
    if (!(initial_temperature > 0.0) || !std::isfinite(initial_temperature)) {
        throw ConfigError(fmt::format("initial_temperature must be positive, got {}", initial_temperature));
    }
    if (!(cooling_rate > 0.0 && cooling_rate < 1.0)) {
        throw ConfigError(fmt::format("cooling_rate must lie in (0, 1), got {}", cooling_rate));
    }
    if (!(min_temperature > 0.0)) {
        throw ConfigError(fmt::format("min_temperature must be positive, got {}", min_temperature));
    }
    if (!(min_temperature < initial_temperature)) {
        throw ConfigError("min_temperature must be below initial_temperature");
    }
    if (steps_per_temperature < 1 || max_iterations < 1 || restarts < 1) {
        throw ConfigError("steps_per_temperature, max_iterations and restarts must be positive");
    }
}

double score(const metrics::ClassAccuracyVector& acc, Objective objective) {
    if (objective == Objective::cobias) return metrics::cobias(acc);
    return metrics::gini(acc).value_or(1.0);
}

double objective_value(const dataset::LabeledPredictionSet& set, const SelectionVector& xi,
                       const CorrectionMap& map, Objective objective) {
    return score(correction::corrected_class_accuracy(set, xi, map), objective);
}

ObjectiveEvaluator::ObjectiveEvaluator(const dataset::LabeledPredictionSet& set,
                                       const CorrectionMap& map, Objective objective)
    : n_classes_(set.n_classes()),
      map_size_(map.size()),
      objective_(objective),
      labels_(set.labels().begin(), set.labels().end()),
      supports_(set.class_counts()) {
    for (std::size_t c = 0; c < n_classes_; ++c) {
        if (supports_[c] == 0) {
            throw DataError(fmt::format("class {} has no instances in the optimization set", c));
        }
    }
    table_.resize(set.size() * n_classes_ * map_size_);
    auto out = table_.begin();
    for (std::size_t m = 0; m < set.size(); ++m) {
        for (const double p : set.row(m)) {
            for (const auto& f : map.functions()) *out++ = f(p);
        }
    }
}

metrics::ClassAccuracyVector ObjectiveEvaluator::accuracy(const SelectionVector& xi) const {
    if (xi.size() != n_classes_) {
        throw ConfigError(fmt::format("selection vector has {} entries for {} classes", xi.size(), n_classes_));
    }
    std::vector<std::size_t> correct(n_classes_, 0);
    const std::size_t stride = n_classes_ * map_size_;
    for (std::size_t m = 0; m < labels_.size(); ++m) {
        const double* row = table_.data() + m * stride;
        std::size_t best = 0;
        double best_score = row[xi[0] - 1];
        for (std::size_t i = 1; i < n_classes_; ++i) {
            const double s = row[i * map_size_ + xi[i] - 1];
            if (s > best_score) {
                best_score = s;
                best = i;
            }
        }
        if (best == labels_[m]) ++correct[best];
    }
    std::vector<double> accuracies(n_classes_);
    for (std::size_t i = 0; i < n_classes_; ++i) {
        accuracies[i] = static_cast<double>(correct[i]) / static_cast<double>(supports_[i]);
    }
    return {std::move(accuracies), supports_};
}

double ObjectiveEvaluator::operator()(const SelectionVector& xi) const {
    return score(accuracy(xi), objective_);
}

SelectionVector neighbor(const SelectionVector& xi, std::size_t map_size, std::mt19937_64& rng) {
    if (map_size <= 1) return xi;
    std::uniform_int_distribution<std::size_t> pick_class(0, xi.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_other(1, map_size - 1);
    const std::size_t cls = pick_class(rng);
    std::size_t value = pick_other(rng);
    if (value >= xi[cls]) ++value;
    return xi.with(cls, value);
}

namespace {

struct RestartOutcome {
    SelectionVector best;
    double best_objective;
};

RestartOutcome run_restart(const ObjectiveEvaluator& evaluate, const AnnealConfig& config,
                           std::size_t restart, double initial_objective, std::size_t& iteration,
                           std::size_t& evaluations, std::vector<TracePoint>& trace) {
    std::seed_seq seq{static_cast<std::uint32_t>(config.seed), static_cast<std::uint32_t>(config.seed >> 32),
                      static_cast<std::uint32_t>(restart)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    SelectionVector current = SelectionVector::all_identity(evaluate.n_classes());
    double current_objective = initial_objective;
    RestartOutcome outcome{current, current_objective};

    double temperature = config.initial_temperature;
    std::size_t moves = 0;
    while (moves < config.max_iterations && temperature >= config.min_temperature) {
        for (std::size_t step = 0; step < config.steps_per_temperature && moves < config.max_iterations;
             ++step, ++moves, ++iteration) {
            SelectionVector candidate = neighbor(current, evaluate.map_size(), rng);
            const double value = evaluate(candidate);
            ++evaluations;
            const double delta = value - current_objective;
            if (delta <= 0.0 || unit(rng) < std::exp(-delta / temperature)) {
                current = std::move(candidate);
                current_objective = value;
                if (current_objective < outcome.best_objective) {
                    outcome = {current, current_objective};
                }
            }
        }
        trace.push_back({iteration, current_objective});
        temperature *= config.cooling_rate;
    }
    return outcome;
}

}  // namespace

OptimizationResult anneal(const dataset::LabeledPredictionSet& set, const CorrectionMap& map,
                          Objective objective, const AnnealConfig& config) {
    config.validate();
    const ObjectiveEvaluator evaluate(set, map, objective);
    const auto identity = SelectionVector::all_identity(set.n_classes());

    OptimizationResult result{identity, 0.0, {}, 0, 0.0};
    result.initial_objective = evaluate(identity);
    result.best_objective = result.initial_objective;
    result.evaluations = 1;
    result.objective_trace.push_back({0, result.initial_objective});
    if (map.size() == 1) return result;

    // Restarts are independent; the merge keeps the first restart on ties.
    std::size_t iteration = 0;
    for (std::size_t r = 0; r < config.restarts; ++r) {
        const auto outcome = run_restart(evaluate, config, r, result.initial_objective, iteration,
                                         result.evaluations, result.objective_trace);
        if (outcome.best_objective < result.best_objective) {
            result.best_objective = outcome.best_objective;
            result.best_xi = outcome.best;
        }
    }
    return result;
}

OptimizationResult exhaustive_search(const dataset::LabeledPredictionSet& set, const CorrectionMap& map,
                                     Objective objective, std::uint64_t budget) {
    const std::size_t n = set.n_classes();
    const std::uint64_t base = map.size();
    std::uint64_t space = 1;
    for (std::size_t i = 0; i < n; ++i) {
        if (space > budget / base) {
            throw InfeasibleError(fmt::format(
                "search space {}^{} exceeds the exhaustive budget of {}; use anneal instead", base, n, budget));
        }
        space *= base;
    }
    if (space > budget) {
        throw InfeasibleError(fmt::format(
            "search space {} exceeds the exhaustive budget of {}; use anneal instead", space, budget));
    }

    const ObjectiveEvaluator evaluate(set, map, objective);
    constexpr double tie_tolerance = 1e-12;

    // Odometer over 1-based digits, last class fastest: lexicographic order.
    std::vector<std::size_t> digits(n, 1);
    OptimizationResult result{SelectionVector(digits), 0.0, {}, 0, 0.0};
    result.initial_objective = evaluate(result.best_xi);
    result.best_objective = result.initial_objective;
    result.evaluations = 1;
    result.objective_trace.push_back({0, result.best_objective});

    for (std::uint64_t k = 1; k < space; ++k) {
        std::size_t pos = n;
        while (pos-- > 0) {
            if (digits[pos] < map.size()) {
                ++digits[pos];
                break;
            }
            digits[pos] = 1;
        }
        SelectionVector candidate(digits);
        const double value = evaluate(candidate);
        ++result.evaluations;
        if (value < result.best_objective - tie_tolerance) {
            result.best_objective = value;
            result.best_xi = std::move(candidate);
            result.objective_trace.push_back({static_cast<std::size_t>(k), value});
        }
    }
    return result;
}

metrics::MetricsReport evaluate_on_test(const dataset::LabeledPredictionSet& test_set,
                                        const SelectionVector& best_xi, const CorrectionMap& map) {
    return metrics::metrics_report(correction::corrected_class_accuracy(test_set, best_xi, map));
}

void to_json(json& j, const AnnealConfig& config) {
    j = json{{"initial_temperature", config.initial_temperature},
             {"cooling_rate", config.cooling_rate},
             {"steps_per_temperature", config.steps_per_temperature},
             {"min_temperature", config.min_temperature},
             {"max_iterations", config.max_iterations},
             {"restarts", config.restarts},
             {"seed", config.seed}};
}

AnnealConfig anneal_config_from_json(const json& j, AnnealConfig base) {
    if (!j.is_object()) throw ConfigError("anneal configuration must be a JSON object");
    try {
        auto read = [&j](const char* key, auto& field) {
            if (j.contains(key)) field = j.at(key).get<std::remove_reference_t<decltype(field)>>();
        };
        read("initial_temperature", base.initial_temperature);
        read("cooling_rate", base.cooling_rate);
        read("steps_per_temperature", base.steps_per_temperature);
        read("min_temperature", base.min_temperature);
        read("max_iterations", base.max_iterations);
        read("restarts", base.restarts);
        read("seed", base.seed);
    } catch (const json::exception& e) {
        throw ConfigError(fmt::format("invalid anneal configuration: {}", e.what()));
    }
    return base;
}

void to_json(json& j, const OptimizationResult& result) {
    json trace = json::array();
    for (const auto& point : result.objective_trace) trace.push_back({point.iteration, point.objective});
    j = json{{"best_xi", std::vector<std::size_t>(result.best_xi.values().begin(), result.best_xi.values().end())},
             {"best_objective", result.best_objective},
             {"initial_objective", result.initial_objective},
             {"evaluations", result.evaluations},
             {"objective_trace", std::move(trace)}};
}

}  // namespace ginidebias::optimizer
