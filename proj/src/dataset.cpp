#include "ginidebias/dataset.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "ginidebias/errors.hpp"

namespace ginidebias::dataset {

using nlohmann::json;

namespace {

// Checks one row against the set invariants. `row_no` is used in messages.
void validate_row(std::span<const double> row, long long label, std::size_t n_classes,
                  std::size_t row_no) {
    double sum = 0.0;
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (!std::isfinite(row[i])) {
            throw LoadError(LoadErrorCode::malformed_row, row_no,
                            fmt::format("probability {} is not finite", i));
        }
        if (row[i] < 0.0) {
            throw LoadError(LoadErrorCode::negative_probability, row_no,
                            fmt::format("probability {} is {}", i, row[i]));
        }
        sum += row[i];
    }
    if (sum == 0.0) {
        throw LoadError(LoadErrorCode::zero_probability_row, row_no, "probabilities sum to zero");
    }
    if (label < 0 || static_cast<unsigned long long>(label) >= n_classes) {
        throw LoadError(LoadErrorCode::label_out_of_range, row_no,
                        fmt::format("label {} not in [0, {})", label, n_classes));
    }
}

void normalize(std::span<double> row) {
    const double sum = std::accumulate(row.begin(), row.end(), 0.0);
    if (sum == 1.0) return;
    for (double& p : row) p /= sum;
}

std::string_view trim(std::string_view s) {
    constexpr std::string_view ws = " \t\r\n";
    const auto first = s.find_first_not_of(ws);
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(ws);
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        fields.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return fields;
}

std::optional<double> parse_double(std::string_view field) {
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty()) {
        return std::nullopt;
    }
    return value;
}

std::optional<long long> parse_integer(std::string_view field) {
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    long long value = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty()) {
        return std::nullopt;
    }
    return value;
}

std::string format_double(double value) {
    std::array<char, 32> buffer{};
    const auto [ptr, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
    return {buffer.data(), ptr};
}

struct RawRows {
    std::size_t n_classes = 0;
    std::vector<double> probs;
    std::vector<std::size_t> labels;
    std::vector<std::string> ids;
};

std::size_t parse_csv_header(std::string_view header) {
    const auto fields = split_fields(header);
    if (fields.size() < 2 || fields.back() != "label") {
        throw LoadError(LoadErrorCode::malformed_row, 1,
                        "header must be prob_0,...,prob_{N-1},label");
    }
    for (std::size_t i = 0; i + 1 < fields.size(); ++i) {
        if (fields[i] != fmt::format("prob_{}", i)) {
            throw LoadError(LoadErrorCode::malformed_row, 1,
                            fmt::format("expected column prob_{}, found '{}'", i, fields[i]));
        }
    }
    return fields.size() - 1;
}

RawRows read_csv(std::istream& in) {
    RawRows raw;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    std::vector<double> row;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        if (!have_header) {
            std::string_view header = line;
            if (header.starts_with("\xEF\xBB\xBF")) header.remove_prefix(3);
            raw.n_classes = parse_csv_header(header);
            have_header = true;
            continue;
        }
        const auto fields = split_fields(line);
        if (fields.size() != raw.n_classes + 1) {
            throw LoadError(LoadErrorCode::inconsistent_classes, line_no,
                            fmt::format("{} fields, header declares {} classes plus label",
                                        fields.size(), raw.n_classes));
        }
        row.clear();
        for (std::size_t i = 0; i < raw.n_classes; ++i) {
            const auto value = parse_double(fields[i]);
            if (!value) {
                throw LoadError(LoadErrorCode::malformed_row, line_no,
                                fmt::format("cannot parse probability '{}'", fields[i]));
            }
            row.push_back(*value);
        }
        const auto label = parse_integer(fields.back());
        if (!label) {
            throw LoadError(LoadErrorCode::malformed_row, line_no,
                            fmt::format("cannot parse label '{}'", fields.back()));
        }
        validate_row(row, *label, raw.n_classes, line_no);
        raw.probs.insert(raw.probs.end(), row.begin(), row.end());
        raw.labels.push_back(static_cast<std::size_t>(*label));
    }
    if (!have_header) {
        throw LoadError(LoadErrorCode::malformed_row, std::nullopt, "missing CSV header");
    }
    return raw;
}

RawRows read_jsonl(std::istream& in) {
    RawRows raw;
    std::string line;
    std::size_t line_no = 0;
    bool any_id = false;
    std::vector<double> row;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        json record;
        try {
            record = json::parse(line);
        } catch (const json::parse_error& e) {
            throw LoadError(LoadErrorCode::malformed_row, line_no, e.what());
        }
        if (!record.is_object() || !record.contains("probs") || !record["probs"].is_array() ||
            !record.contains("label")) {
            throw LoadError(LoadErrorCode::malformed_row, line_no,
                            "expected an object with \"probs\" array and \"label\"");
        }
        const auto& probs = record["probs"];
        if (raw.labels.empty()) {
            if (probs.empty()) {
                throw LoadError(LoadErrorCode::malformed_row, line_no, "empty probability array");
            }
            raw.n_classes = probs.size();
        } else if (probs.size() != raw.n_classes) {
            throw LoadError(LoadErrorCode::inconsistent_classes, line_no,
                            fmt::format("{} probabilities, expected {}", probs.size(), raw.n_classes));
        }
        row.clear();
        for (const auto& p : probs) {
            if (!p.is_number()) {
                throw LoadError(LoadErrorCode::malformed_row, line_no, "non-numeric probability");
            }
            row.push_back(p.get<double>());
        }
        const auto& label = record["label"];
        if (!label.is_number_integer()) {
            throw LoadError(LoadErrorCode::malformed_row, line_no, "label must be an integer");
        }
        validate_row(row, label.get<long long>(), raw.n_classes, line_no);
        raw.probs.insert(raw.probs.end(), row.begin(), row.end());
        raw.labels.push_back(label.get<std::size_t>());

        std::string id;
        if (record.contains("id")) {
            if (!record["id"].is_string()) {
                throw LoadError(LoadErrorCode::malformed_row, line_no, "\"id\" must be a string");
            }
            id = record["id"].get<std::string>();
            any_id = true;
        }
        raw.ids.push_back(std::move(id));
    }
    if (!any_id) raw.ids.clear();
    return raw;
}

}  // namespace

LabeledPredictionSet::LabeledPredictionSet(std::size_t n_classes, std::vector<double> probs,
                                           std::vector<std::size_t> labels,
                                           std::vector<std::string> ids,
                                           std::vector<std::string> class_names)
    : n_classes_(n_classes),
      probs_(std::move(probs)),
      labels_(std::move(labels)),
      ids_(std::move(ids)),
      class_names_(std::move(class_names)) {
    if (n_classes_ == 0) {
        throw DataError("a prediction set needs at least one class");
    }
    if (probs_.size() != labels_.size() * n_classes_) {
        throw LoadError(LoadErrorCode::inconsistent_classes, std::nullopt,
                        fmt::format("{} probabilities cannot form {} rows of {} classes",
                                    probs_.size(), labels_.size(), n_classes_));
    }
    if (!ids_.empty() && ids_.size() != labels_.size()) {
        throw DataError(fmt::format("{} ids given for {} rows", ids_.size(), labels_.size()));
    }
    if (!class_names_.empty() && class_names_.size() != n_classes_) {
        throw DataError(
            fmt::format("{} class names given for {} classes", class_names_.size(), n_classes_));
    }
    for (std::size_t m = 0; m < labels_.size(); ++m) {
        const std::span<double> r(probs_.data() + m * n_classes_, n_classes_);
        validate_row(r, static_cast<long long>(labels_[m]), n_classes_, m + 1);
        normalize(r);
    }
}

LabeledPredictionSet LabeledPredictionSet::from_rows(const std::vector<std::vector<double>>& rows,
                                                     std::vector<std::size_t> labels) {
    if (rows.empty()) {
        throw DataError("from_rows needs at least one row to infer the class count");
    }
    const std::size_t n = rows.front().size();
    std::vector<double> flat;
    flat.reserve(rows.size() * n);
    for (std::size_t m = 0; m < rows.size(); ++m) {
        if (rows[m].size() != n) {
            throw LoadError(LoadErrorCode::inconsistent_classes, m + 1,
                            fmt::format("{} probabilities, expected {}", rows[m].size(), n));
        }
        flat.insert(flat.end(), rows[m].begin(), rows[m].end());
    }
    return {n, std::move(flat), std::move(labels)};
}

std::span<const double> LabeledPredictionSet::row(std::size_t m) const {
    return {probs_.data() + m * n_classes_, n_classes_};
}

std::vector<std::size_t> LabeledPredictionSet::class_counts() const {
    std::vector<std::size_t> counts(n_classes_, 0);
    for (const auto y : labels_) ++counts[y];
    return counts;
}

LabeledPredictionSet LabeledPredictionSet::subset(std::span<const std::size_t> indices) const {
    std::vector<double> probs;
    probs.reserve(indices.size() * n_classes_);
    std::vector<std::size_t> labels;
    labels.reserve(indices.size());
    std::vector<std::string> ids;
    for (const auto m : indices) {
        const auto r = row(m);
        probs.insert(probs.end(), r.begin(), r.end());
        labels.push_back(labels_[m]);
        if (!ids_.empty()) ids.push_back(ids_[m]);
    }
    return {n_classes_, std::move(probs), std::move(labels), std::move(ids), class_names_};
}

LabeledPredictionSet LabeledPredictionSet::with_class_names(std::vector<std::string> names) const {
    return {n_classes_, probs_, labels_, ids_, std::move(names)};
}

std::string_view to_string(PredictionFormat format) noexcept {
    return format == PredictionFormat::csv ? "csv" : "jsonl";
}

std::optional<PredictionFormat> parse_format(std::string_view name) noexcept {
    if (name == "csv") return PredictionFormat::csv;
    if (name == "jsonl") return PredictionFormat::jsonl;
    return std::nullopt;
}

std::optional<PredictionFormat> format_from_path(const std::filesystem::path& path) {
    const auto ext = path.extension().string();
    if (ext == ".csv") return PredictionFormat::csv;
    if (ext == ".jsonl") return PredictionFormat::jsonl;
    return std::nullopt;
}

LabeledPredictionSet read_predictions(std::istream& in, PredictionFormat format) {
    RawRows raw = format == PredictionFormat::csv ? read_csv(in) : read_jsonl(in);
    if (raw.labels.empty()) {
        throw LoadError(LoadErrorCode::malformed_row, std::nullopt, "no prediction rows");
    }
    return {raw.n_classes, std::move(raw.probs), std::move(raw.labels), std::move(raw.ids)};
}

LabeledPredictionSet load_predictions(const std::filesystem::path& path, PredictionFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw LoadError(LoadErrorCode::io, std::nullopt,
                        fmt::format("cannot open '{}'", path.string()));
    }
    return read_predictions(in, format);
}

void write_predictions(std::ostream& out, const LabeledPredictionSet& set, PredictionFormat format) {
    const std::size_t n = set.n_classes();
    if (format == PredictionFormat::csv) {
        for (std::size_t i = 0; i < n; ++i) out << "prob_" << i << ',';
        out << "label\n";
        for (std::size_t m = 0; m < set.size(); ++m) {
            for (const double p : set.row(m)) out << format_double(p) << ',';
            out << set.label(m) << '\n';
        }
        return;
    }
    for (std::size_t m = 0; m < set.size(); ++m) {
        out << "{\"probs\": [";
        const auto r = set.row(m);
        for (std::size_t i = 0; i < n; ++i) {
            if (i > 0) out << ", ";
            out << format_double(r[i]);
        }
        out << "], \"label\": " << set.label(m);
        if (!set.ids().empty()) out << ", \"id\": " << json(set.ids()[m]).dump();
        out << "}\n";
    }
}

void save_predictions(const std::filesystem::path& path, const LabeledPredictionSet& set,
                      PredictionFormat format) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw LoadError(LoadErrorCode::io, std::nullopt,
                        fmt::format("cannot write '{}'", path.string()));
    }
    write_predictions(out, set, format);
}

metrics::ClassAccuracyVector read_accuracy_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw LoadError(LoadErrorCode::io, std::nullopt,
                        fmt::format("cannot open '{}'", path.string()));
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw LoadError(LoadErrorCode::malformed_row, std::nullopt, e.what());
    }
    if (!doc.is_object() || !doc.contains("accuracies") || !doc["accuracies"].is_array()) {
        throw LoadError(LoadErrorCode::malformed_row, std::nullopt,
                        "expected an object with an \"accuracies\" array");
    }
    try {
        auto accuracies = doc["accuracies"].get<std::vector<double>>();
        std::optional<metrics::ClassAccuracyVector> acc;
        if (doc.contains("supports") && !doc["supports"].is_null()) {
            acc.emplace(std::move(accuracies), doc["supports"].get<std::vector<std::size_t>>());
        } else {
            acc.emplace(std::move(accuracies));
        }
        if (doc.contains("class_names") && !doc["class_names"].is_null()) {
            acc->set_class_names(doc["class_names"].get<std::vector<std::string>>());
        }
        return *std::move(acc);
    } catch (const json::exception& e) {
        throw LoadError(LoadErrorCode::malformed_row, std::nullopt, e.what());
    }
}

std::size_t argmax_predict(std::span<const double> row) noexcept {
    std::size_t best = 0;
    for (std::size_t i = 1; i < row.size(); ++i) {
        if (row[i] > row[best]) best = i;
    }
    return best;
}

std::vector<std::size_t> predict(const LabeledPredictionSet& set) {
    std::vector<std::size_t> predictions(set.size());
    for (std::size_t m = 0; m < set.size(); ++m) predictions[m] = argmax_predict(set.row(m));
    return predictions;
}

metrics::ClassAccuracyVector per_class_accuracy(const LabeledPredictionSet& set,
                                                std::span<const std::size_t> predictions,
                                                bool strict) {
    if (predictions.size() != set.size()) {
        throw DataError(fmt::format("{} predictions for {} instances", predictions.size(), set.size()));
    }
    const std::size_t n = set.n_classes();
    std::vector<std::size_t> correct(n, 0);
    std::vector<std::size_t> support(n, 0);
    for (std::size_t m = 0; m < set.size(); ++m) {
        const auto y = set.label(m);
        ++support[y];
        if (predictions[m] == y) ++correct[y];
    }
    std::vector<double> accuracies(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (support[i] == 0) {
            if (strict) throw DataError(fmt::format("class {} has no instances", i));
            continue;
        }
        accuracies[i] = static_cast<double>(correct[i]) / static_cast<double>(support[i]);
    }
    metrics::ClassAccuracyVector acc(std::move(accuracies), std::move(support));
    acc.set_class_names(set.class_names());
    return acc;
}

SplitResult split(const LabeledPredictionSet& set, const SplitSpec& spec) {
    const double f = spec.optimization_fraction;
    if (!(f > 0.0 && f < 1.0)) {
        throw ConfigError(fmt::format("split fraction must lie strictly in (0, 1), got {}", f));
    }
    const std::size_t m_total = set.size();
    if (m_total < 2) {
        throw DataError("splitting needs at least two instances");
    }
    // Guards against products such as 0.3 * 10 landing a hair off an integer.
    constexpr double eps = 1e-9;

    std::mt19937_64 rng(spec.seed);
    std::vector<std::size_t> chosen;
    if (spec.stratified) {
        std::vector<std::vector<std::size_t>> by_class(set.n_classes());
        for (std::size_t m = 0; m < m_total; ++m) by_class[set.label(m)].push_back(m);
        for (std::size_t c = 0; c < by_class.size(); ++c) {
            if (by_class[c].size() < 2) {
                throw DataError(fmt::format(
                    "stratified split needs at least 2 instances of every class; class {} has {}",
                    c, by_class[c].size()));
            }
        }
        for (auto& members : by_class) {
            const auto n_c = members.size();
            auto take = static_cast<std::size_t>(std::ceil(f * static_cast<double>(n_c) - eps));
            take = std::clamp<std::size_t>(take, 1, n_c - 1);
            std::shuffle(members.begin(), members.end(), rng);
            chosen.insert(chosen.end(), members.begin(), members.begin() + static_cast<long>(take));
        }
    } else {
        std::vector<std::size_t> order(m_total);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::shuffle(order.begin(), order.end(), rng);
        auto take = static_cast<std::size_t>(std::floor(f * static_cast<double>(m_total) + eps));
        take = std::clamp<std::size_t>(take, 1, m_total - 1);
        chosen.assign(order.begin(), order.begin() + static_cast<long>(take));
    }
    std::ranges::sort(chosen);

    std::vector<bool> in_opt(m_total, false);
    for (const auto m : chosen) in_opt[m] = true;
    std::vector<std::size_t> rest;
    rest.reserve(m_total - chosen.size());
    for (std::size_t m = 0; m < m_total; ++m) {
        if (!in_opt[m]) rest.push_back(m);
    }
    auto opt = set.subset(chosen);
    auto test = set.subset(rest);
    return SplitResult{std::move(opt), std::move(test), std::move(chosen), std::move(rest)};
}

void SynthSpec::validate() const {
    if (n_classes < 2) {
        throw ConfigError("synthetic data needs at least 2 classes");
    }
    if (instances_per_class.size() != n_classes) {
        throw ConfigError(fmt::format("{} instance counts given for {} classes",
                                      instances_per_class.size(), n_classes));
    }
    for (std::size_t c = 0; c < n_classes; ++c) {
        if (instances_per_class[c] < 1) {
            throw ConfigError(fmt::format("class {} needs at least one instance", c));
        }
    }
    for (const auto h : head_classes) {
        if (h >= n_classes) {
            throw ConfigError(fmt::format("head class {} not in [0, {})", h, n_classes));
        }
    }
    if (!(head_bias >= 0.0) || !std::isfinite(head_bias)) {
        throw ConfigError(fmt::format("head_bias must be finite and >= 0, got {}", head_bias));
    }
    if (!(noise_scale >= 0.0) || !std::isfinite(noise_scale)) {
        throw ConfigError(fmt::format("noise_scale must be finite and >= 0, got {}", noise_scale));
    }
}

LabeledPredictionSet synthesize(const SynthSpec& spec) {
    spec.validate();
    const std::size_t n = spec.n_classes;
    std::vector<double> bias(n, 0.0);
    for (const auto h : spec.head_classes) bias[h] = spec.head_bias;

    const std::size_t total =
        std::accumulate(spec.instances_per_class.begin(), spec.instances_per_class.end(), std::size_t{0});
    std::vector<double> probs;
    probs.reserve(total * n);
    std::vector<std::size_t> labels;
    labels.reserve(total);

    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<double> logits(n);
    for (std::size_t y = 0; y < n; ++y) {
        for (std::size_t k = 0; k < spec.instances_per_class[y]; ++k) {
            for (std::size_t j = 0; j < n; ++j) {
                logits[j] = spec.noise_scale * noise(rng) + (j == y ? 1.0 : 0.0) + bias[j];
            }
            const double top = std::ranges::max(logits);
            double sum = 0.0;
            for (double& z : logits) {
                z = std::exp(z - top);
                sum += z;
            }
            for (const double z : logits) probs.push_back(z / sum);
            labels.push_back(y);
        }
    }
    return {n, std::move(probs), std::move(labels)};
}

}  // namespace ginidebias::dataset
