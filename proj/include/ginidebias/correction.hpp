#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ginidebias/dataset.hpp"
#include "ginidebias/metrics.hpp"

namespace ginidebias::correction {

enum class FunctionKind { identity, scale, triangular };

/// One entry of the correction map: a non-negative function of a class
/// probability p in [0, 1].
class CorrectionFunction {
public:
    static CorrectionFunction identity() noexcept;
    /// p -> weight * p. Requires weight > 0.
    static CorrectionFunction scale(double weight);
    /// Triangular membership with feet a, b and peak c: 0 <= a < c < b <= 1.
    /// The output is the membership value itself, not p scaled by it.
    static CorrectionFunction triangular(double a, double c, double b);

    [[nodiscard]] FunctionKind kind() const noexcept { return kind_; }
    [[nodiscard]] double weight() const noexcept { return weight_; }
    [[nodiscard]] double left() const noexcept { return a_; }
    [[nodiscard]] double peak() const noexcept { return c_; }
    [[nodiscard]] double right() const noexcept { return b_; }

    [[nodiscard]] double operator()(double p) const noexcept;

    [[nodiscard]] std::string describe() const;

    friend bool operator==(const CorrectionFunction&, const CorrectionFunction&) = default;

private:
    CorrectionFunction() = default;

    FunctionKind kind_ = FunctionKind::identity;
    double weight_ = 1.0;
    double a_ = 0.0;
    double c_ = 0.0;
    double b_ = 0.0;
};

[[nodiscard]] double evaluate(const CorrectionFunction& f, double p) noexcept;

/// Ordered catalog F. The first entry is always the identity, so the
/// uncorrected model stays representable.
class CorrectionMap {
public:
    explicit CorrectionMap(std::vector<CorrectionFunction> functions);

    /// identity; scales 0.1, 0.2, 0.5, 1.5, 2.0; triangulars (0, .25, .5),
    /// (.25, .5, .75), (.5, .75, 1).
    static CorrectionMap default_map();
    /// identity plus the default scale weights only.
    static CorrectionMap weights_only();
    static CorrectionMap identity_only();

    [[nodiscard]] std::size_t size() const noexcept { return functions_.size(); }
    [[nodiscard]] const CorrectionFunction& at(std::size_t index_1based) const;
    [[nodiscard]] std::span<const CorrectionFunction> functions() const noexcept { return functions_; }

    friend bool operator==(const CorrectionMap&, const CorrectionMap&) = default;

private:
    std::vector<CorrectionFunction> functions_;
};

/// One function index per class, 1-based into the map.
class SelectionVector {
public:
    explicit SelectionVector(std::vector<std::size_t> xi);

    static SelectionVector all_identity(std::size_t n_classes);

    [[nodiscard]] std::size_t size() const noexcept { return xi_.size(); }
    [[nodiscard]] std::size_t operator[](std::size_t cls) const { return xi_[cls]; }
    [[nodiscard]] std::span<const std::size_t> values() const noexcept { return xi_; }
    [[nodiscard]] bool is_all_identity() const noexcept;

    /// Returns a copy with class `cls` set to `index`.
    [[nodiscard]] SelectionVector with(std::size_t cls, std::size_t index) const;

    /// Throws ConfigError unless length == n_classes and every index fits `map`.
    void check_against(const CorrectionMap& map, std::size_t n_classes) const;

    friend bool operator==(const SelectionVector&, const SelectionVector&) = default;
    friend auto operator<=>(const SelectionVector&, const SelectionVector&) = default;

private:
    std::vector<std::size_t> xi_;
};

/// f_{xi_i}(p_i) per class. Not renormalized.
[[nodiscard]] std::vector<double> corrected_scores(std::span<const double> row,
                                                   const SelectionVector& xi,
                                                   const CorrectionMap& map);

/// Argmax of corrected scores, lowest index on ties.
[[nodiscard]] std::size_t corrected_predict(std::span<const double> row, const SelectionVector& xi,
                                            const CorrectionMap& map);

[[nodiscard]] std::vector<std::size_t> corrected_predictions(const dataset::LabeledPredictionSet& set,
                                                             const SelectionVector& xi,
                                                             const CorrectionMap& map);

/// Per-class accuracy of corrected predictions. Every class must have support.
[[nodiscard]] metrics::ClassAccuracyVector corrected_class_accuracy(
    const dataset::LabeledPredictionSet& set, const SelectionVector& xi, const CorrectionMap& map);

/// The inference-time artifact: map plus learned selection.
struct CorrectionArtifact {
    CorrectionMap map;
    SelectionVector xi;
    std::vector<std::string> class_names;
};

void to_json(nlohmann::json& j, const CorrectionFunction& f);
[[nodiscard]] CorrectionFunction function_from_json(const nlohmann::json& j);

void to_json(nlohmann::json& j, const CorrectionMap& map);
[[nodiscard]] CorrectionMap map_from_json(const nlohmann::json& j);

/// `{"functions": [...], "xi": [...], "class_names": [...]}`; extra keys are
/// ignored on read.
[[nodiscard]] nlohmann::json artifact_to_json(const CorrectionArtifact& artifact);
[[nodiscard]] CorrectionArtifact artifact_from_json(const nlohmann::json& j);

}  // namespace ginidebias::correction
