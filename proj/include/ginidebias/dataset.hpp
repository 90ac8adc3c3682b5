#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ginidebias/metrics.hpp"

namespace ginidebias::dataset {

/// Class-probability rows with gold labels. Immutable once built.
///
/// Rows are validated and normalized to sum to one at construction. Classes
/// are dense indices 0..N-1; names and instance ids are display metadata.
class LabeledPredictionSet {
public:
    /// `probs` is row-major, `labels.size()` rows of `n_classes` values.
    /// Errors are LoadError carrying the 1-based row number.
    LabeledPredictionSet(std::size_t n_classes, std::vector<double> probs,
                         std::vector<std::size_t> labels, std::vector<std::string> ids = {},
                         std::vector<std::string> class_names = {});

    static LabeledPredictionSet from_rows(const std::vector<std::vector<double>>& rows,
                                          std::vector<std::size_t> labels);

    [[nodiscard]] std::size_t size() const noexcept { return labels_.size(); }
    [[nodiscard]] std::size_t n_classes() const noexcept { return n_classes_; }
    [[nodiscard]] std::span<const double> row(std::size_t m) const;
    [[nodiscard]] std::size_t label(std::size_t m) const { return labels_[m]; }
    [[nodiscard]] std::span<const std::size_t> labels() const noexcept { return labels_; }
    [[nodiscard]] std::span<const double> probabilities() const noexcept { return probs_; }

    /// Empty, or one id per row.
    [[nodiscard]] const std::vector<std::string>& ids() const noexcept { return ids_; }
    /// Empty, or one name per class.
    [[nodiscard]] const std::vector<std::string>& class_names() const noexcept { return class_names_; }

    /// Instances per class (|S_i|).
    [[nodiscard]] std::vector<std::size_t> class_counts() const;

    /// Rows at `indices`, in the given order.
    [[nodiscard]] LabeledPredictionSet subset(std::span<const std::size_t> indices) const;

    [[nodiscard]] LabeledPredictionSet with_class_names(std::vector<std::string> names) const;

private:
    std::size_t n_classes_;
    std::vector<double> probs_;
    std::vector<std::size_t> labels_;
    std::vector<std::string> ids_;
    std::vector<std::string> class_names_;
};

enum class PredictionFormat { csv, jsonl };

[[nodiscard]] std::string_view to_string(PredictionFormat format) noexcept;
[[nodiscard]] std::optional<PredictionFormat> parse_format(std::string_view name) noexcept;
/// Guess from the file extension (.csv / .jsonl).
[[nodiscard]] std::optional<PredictionFormat> format_from_path(const std::filesystem::path& path);

/// CSV: header `prob_0,...,prob_{N-1},label`, one instance per line.
/// JSONL: one `{"probs": [...], "label": k, "id": "..."}` object per line.
/// Error row numbers are physical line numbers (the CSV header is line 1).
[[nodiscard]] LabeledPredictionSet read_predictions(std::istream& in, PredictionFormat format);
[[nodiscard]] LabeledPredictionSet load_predictions(const std::filesystem::path& path,
                                                    PredictionFormat format);

/// Shortest round-trip decimal representation, so output is byte-stable.
void write_predictions(std::ostream& out, const LabeledPredictionSet& set, PredictionFormat format);
void save_predictions(const std::filesystem::path& path, const LabeledPredictionSet& set,
                      PredictionFormat format);

/// Accuracy-only input: `{"accuracies": [...], "supports": [...], "class_names": [...]}`
/// with supports and names optional.
[[nodiscard]] metrics::ClassAccuracyVector read_accuracy_file(const std::filesystem::path& path);

/// Smallest index attaining the maximum.
[[nodiscard]] std::size_t argmax_predict(std::span<const double> row) noexcept;

/// argmax_predict over every row.
[[nodiscard]] std::vector<std::size_t> predict(const LabeledPredictionSet& set);

/// Eq. (6)-style accuracy per gold class. Classes without instances get
/// accuracy 0 and support 0; with `strict` they are an error instead.
[[nodiscard]] metrics::ClassAccuracyVector per_class_accuracy(const LabeledPredictionSet& set,
                                                              std::span<const std::size_t> predictions,
                                                              bool strict = false);

struct SplitSpec {
    double optimization_fraction = 0.5;
    std::uint64_t seed = 0;
    bool stratified = true;
};

struct SplitResult {
    LabeledPredictionSet optimization;
    LabeledPredictionSet test;
    std::vector<std::size_t> optimization_indices;  // into the input, ascending
    std::vector<std::size_t> test_indices;
};

/// Random partition into an optimization part and a test part.
///
/// Plain mode: the optimization part has floor(fraction * M) rows, clamped so
/// each part has at least one. Stratified mode: class c contributes
/// ceil(fraction * n_c) rows, clamped to [1, n_c - 1], so every class appears
/// in both parts. Row order within each part follows the input.
[[nodiscard]] SplitResult split(const LabeledPredictionSet& set, const SplitSpec& spec);

/// Generator for imbalanced prediction sets.
///
/// Each instance of class y gets logits z_j = noise_scale * e_j + [j == y] +
/// head_bias * [j in head_classes] with e_j standard normal; the row is
/// softmax(z).
struct SynthSpec {
    std::size_t n_classes = 4;
    std::vector<std::size_t> instances_per_class;  // one count per class
    double head_bias = 0.0;
    std::vector<std::size_t> head_classes;
    double noise_scale = 1.0;
    std::uint64_t seed = 0;

    /// Throws ConfigError when the spec is inconsistent.
    void validate() const;
};

[[nodiscard]] LabeledPredictionSet synthesize(const SynthSpec& spec);

}  // namespace ginidebias::dataset
