#include "ginidebias/correction.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "ginidebias/errors.hpp"

namespace ginidebias::correction {

using nlohmann::json;

CorrectionFunction CorrectionFunction::identity() noexcept { return CorrectionFunction{}; }

CorrectionFunction CorrectionFunction::scale(double weight) {
    if (!(weight > 0.0) || !std::isfinite(weight)) {
        throw ConfigError(fmt::format("scale weight must be finite and positive, got {}", weight));
    }
    CorrectionFunction f;
    f.kind_ = FunctionKind::scale;
    f.weight_ = weight;
    return f;
}

CorrectionFunction CorrectionFunction::triangular(double a, double c, double b) {
    if (!(0.0 <= a && a < c && c < b && b <= 1.0)) {
        throw ConfigError(
            fmt::format("triangular function needs 0 <= a < c < b <= 1, got ({}, {}, {})", a, c, b));
    }
    CorrectionFunction f;
    f.kind_ = FunctionKind::triangular;
    f.a_ = a;
    f.c_ = c;
    f.b_ = b;
    return f;
}

double CorrectionFunction::operator()(double p) const noexcept {
    switch (kind_) {
        case FunctionKind::identity:
            return p;
        case FunctionKind::scale:
            return weight_ * p;
        case FunctionKind::triangular:
            return std::max(0.0, std::min((p - a_) / (c_ - a_), (b_ - p) / (b_ - c_)));
    }
    return p;
}

std::string CorrectionFunction::describe() const {
    switch (kind_) {
        case FunctionKind::identity: return "identity";
        case FunctionKind::scale: return fmt::format("scale({})", weight_);
        case FunctionKind::triangular: return fmt::format("triangular({}, {}, {})", a_, c_, b_);
    }
    return "?";
}

double evaluate(const CorrectionFunction& f, double p) noexcept { return f(p); }

CorrectionMap::CorrectionMap(std::vector<CorrectionFunction> functions)
    : functions_(std::move(functions)) {
    if (functions_.empty()) {
        throw ConfigError("correction map must contain at least one function");
    }
    if (functions_.front().kind() != FunctionKind::identity) {
        throw ConfigError("the first function of a correction map must be the identity");
    }
}

CorrectionMap CorrectionMap::weights_only() {
    return CorrectionMap({CorrectionFunction::identity(), CorrectionFunction::scale(0.1),
                          CorrectionFunction::scale(0.2), CorrectionFunction::scale(0.5),
                          CorrectionFunction::scale(1.5), CorrectionFunction::scale(2.0)});
}

CorrectionMap CorrectionMap::default_map() {
    auto functions = weights_only().functions_;
    functions.push_back(CorrectionFunction::triangular(0.0, 0.25, 0.5));
    functions.push_back(CorrectionFunction::triangular(0.25, 0.5, 0.75));
    functions.push_back(CorrectionFunction::triangular(0.5, 0.75, 1.0));
    return CorrectionMap(std::move(functions));
}

CorrectionMap CorrectionMap::identity_only() {
    return CorrectionMap({CorrectionFunction::identity()});
}

const CorrectionFunction& CorrectionMap::at(std::size_t index_1based) const {
    if (index_1based < 1 || index_1based > functions_.size()) {
        throw ConfigError(
            fmt::format("function index {} not in [1, {}]", index_1based, functions_.size()));
    }
    return functions_[index_1based - 1];
}

SelectionVector::SelectionVector(std::vector<std::size_t> xi) : xi_(std::move(xi)) {
    if (xi_.empty()) {
        throw ConfigError("selection vector must cover at least one class");
    }
    for (const auto v : xi_) {
        if (v < 1) throw ConfigError("selection indices are 1-based");
    }
}

SelectionVector SelectionVector::all_identity(std::size_t n_classes) {
    return SelectionVector(std::vector<std::size_t>(n_classes, 1));
}

bool SelectionVector::is_all_identity() const noexcept {
    return std::ranges::all_of(xi_, [](std::size_t v) { return v == 1; });
}

SelectionVector SelectionVector::with(std::size_t cls, std::size_t index) const {
    SelectionVector copy = *this;
    copy.xi_.at(cls) = index;
    return copy;
}

void SelectionVector::check_against(const CorrectionMap& map, std::size_t n_classes) const {
    if (xi_.size() != n_classes) {
        throw ConfigError(
            fmt::format("selection vector has {} entries for {} classes", xi_.size(), n_classes));
    }
    for (std::size_t i = 0; i < xi_.size(); ++i) {
        if (xi_[i] > map.size()) {
            throw ConfigError(fmt::format("class {} selects function {} but the map has {}", i,
                                          xi_[i], map.size()));
        }
    }
}

std::vector<double> corrected_scores(std::span<const double> row, const SelectionVector& xi,
                                     const CorrectionMap& map) {
    if (row.size() != xi.size()) {
        throw ConfigError(fmt::format("row has {} classes, selection vector {}", row.size(), xi.size()));
    }
    std::vector<double> scores(row.size());
    for (std::size_t i = 0; i < row.size(); ++i) scores[i] = map.at(xi[i])(row[i]);
    return scores;
}

std::size_t corrected_predict(std::span<const double> row, const SelectionVector& xi,
                              const CorrectionMap& map) {
    return dataset::argmax_predict(corrected_scores(row, xi, map));
}

std::vector<std::size_t> corrected_predictions(const dataset::LabeledPredictionSet& set,
                                               const SelectionVector& xi, const CorrectionMap& map) {
    xi.check_against(map, set.n_classes());
    std::vector<std::size_t> predictions(set.size());
    for (std::size_t m = 0; m < set.size(); ++m) {
        predictions[m] = corrected_predict(set.row(m), xi, map);
    }
    return predictions;
}

metrics::ClassAccuracyVector corrected_class_accuracy(const dataset::LabeledPredictionSet& set,
                                                      const SelectionVector& xi,
                                                      const CorrectionMap& map) {
    return dataset::per_class_accuracy(set, corrected_predictions(set, xi, map), /*strict=*/true);
}

void to_json(json& j, const CorrectionFunction& f) {
    switch (f.kind()) {
        case FunctionKind::identity:
            j = json{{"kind", "identity"}};
            break;
        case FunctionKind::scale:
            j = json{{"kind", "scale"}, {"weight", f.weight()}};
            break;
        case FunctionKind::triangular:
            j = json{{"kind", "triangular"}, {"a", f.left()}, {"c", f.peak()}, {"b", f.right()}};
            break;
    }
}

CorrectionFunction function_from_json(const json& j) {
    try {
        const auto kind = j.at("kind").get<std::string>();
        if (kind == "identity") return CorrectionFunction::identity();
        if (kind == "scale") return CorrectionFunction::scale(j.at("weight").get<double>());
        if (kind == "triangular") {
            return CorrectionFunction::triangular(j.at("a").get<double>(), j.at("c").get<double>(),
                                                  j.at("b").get<double>());
        }
        throw ConfigError(fmt::format("unknown correction function kind '{}'", kind));
    } catch (const json::exception& e) {
        throw ConfigError(fmt::format("invalid correction function: {}", e.what()));
    }
}

void to_json(json& j, const CorrectionMap& map) {
    j = json::array();
    for (const auto& f : map.functions()) j.push_back(f);
}

CorrectionMap map_from_json(const json& j) {
    if (!j.is_array()) throw ConfigError("correction map must be a JSON array of functions");
    std::vector<CorrectionFunction> functions;
    for (const auto& item : j) functions.push_back(function_from_json(item));
    return CorrectionMap(std::move(functions));
}

json artifact_to_json(const CorrectionArtifact& artifact) {
    json j;
    j["functions"] = artifact.map;
    j["xi"] = std::vector<std::size_t>(artifact.xi.values().begin(), artifact.xi.values().end());
    if (!artifact.class_names.empty()) j["class_names"] = artifact.class_names;
    return j;
}

CorrectionArtifact artifact_from_json(const json& j) {
    if (!j.is_object() || !j.contains("functions") || !j.contains("xi")) {
        throw ConfigError("correction artifact needs \"functions\" and \"xi\"");
    }
    auto map = map_from_json(j["functions"]);
    std::vector<std::size_t> xi;
    try {
        xi = j["xi"].get<std::vector<std::size_t>>();
    } catch (const json::exception& e) {
        throw ConfigError(fmt::format("invalid \"xi\": {}", e.what()));
    }
    SelectionVector selection(std::move(xi));
    selection.check_against(map, selection.size());
    std::vector<std::string> names;
    if (j.contains("class_names") && j["class_names"].is_array()) {
        names = j["class_names"].get<std::vector<std::string>>();
    }
    return CorrectionArtifact{std::move(map), std::move(selection), std::move(names)};
}

}  // namespace ginidebias::correction
