#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ginidebias/errors.hpp"
#include "ginidebias/metrics.hpp"
#include "ginidebias/optimizer.hpp"

// Command implementations behind the `ginidebias` executable. Each command
// throws ginidebias::Error on failure; run_guarded turns that into an exit
// code and a message.

namespace ginidebias::cli {

inline constexpr int kSchemaVersion = 1;
inline constexpr std::string_view kToolVersion = "0.1.0";

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitData = 2,
    kExitConfig = 3,
    kExitInfeasible = 4,
};

[[nodiscard]] int exit_code_for(ErrorKind kind) noexcept;

/// Runs `command`, printing any ginidebias::Error to `err`.
int run_guarded(const std::function<int()>& command, std::ostream& err);

// ---- report schema and rendering ------------------------------------------

[[nodiscard]] nlohmann::json report_to_json(const metrics::MetricsReport& report);
/// Reads the scalar fields as stored; nothing is recomputed.
[[nodiscard]] metrics::MetricsReport report_from_json(const nlohmann::json& j);

/// Fixed two-decimal rendering; "n/a" for undefined values.
[[nodiscard]] std::string format_value(std::optional<double> value);

/// Signed relative change (after - before) / before as an arrow and integer
/// percent, e.g. "↓ 86%". "0%" when it rounds to zero, "n/a" when undefined.
[[nodiscard]] std::string relative_improvement(std::optional<double> before, std::optional<double> after);

[[nodiscard]] std::string render_report(const metrics::MetricsReport& report);
[[nodiscard]] std::string render_comparison(const metrics::MetricsReport& before,
                                            const metrics::MetricsReport& after,
                                            std::string_view after_title = "Debiased");

// ---- run manifest ------------------------------------------------------------

/// Lowercase hex SHA-256 of the file contents.
[[nodiscard]] std::string file_sha256(const std::filesystem::path& path);

struct RunManifest {
    std::string command;
    nlohmann::json config;
    std::vector<std::filesystem::path> inputs;
    std::uint64_t seed = 0;
    std::string started;  // ISO-8601 UTC
};

/// `timestamps` is the only member that varies between identical runs.
[[nodiscard]] nlohmann::json manifest_to_json(const RunManifest& manifest);

// ---- commands ----------------------------------------------------------------

struct MetricsOptions {
    std::filesystem::path input;
    std::optional<std::string> format;  // csv | jsonl | accuracy; inferred from extension otherwise
    std::filesystem::path out = ".";
    bool strict = false;
};

struct OptimizeOptions {
    std::filesystem::path input;
    std::optional<std::filesystem::path> test;  // when absent the input is split
    std::optional<std::string> format;
    std::optional<std::filesystem::path> config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> objective;
    std::optional<double> split;
    std::optional<bool> stratified;
    std::optional<std::string> map;  // default | weights_only | identity
    std::optional<std::string> method;  // anneal | exhaustive
    std::filesystem::path out = ".";
    bool strict = false;
};

struct ApplyOptions {
    std::filesystem::path input;
    std::filesystem::path artifact;
    std::optional<std::string> format;
    std::filesystem::path out = ".";
    bool strict = false;
};

struct SynthOptions {
    std::optional<std::filesystem::path> config;
    std::optional<std::size_t> classes;
    std::vector<std::size_t> counts;  // one value broadcasts to every class
    std::optional<double> head_bias;
    std::optional<std::vector<std::size_t>> head_classes;
    std::optional<double> noise;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> format;
    std::filesystem::path out = ".";
};

struct ReportOptions {
    std::filesystem::path before;
    std::filesystem::path after;
    std::optional<std::filesystem::path> out;
    std::string title = "Debiased";
};

/// Writes `<out>/metrics.json`.
int cmd_metrics(const MetricsOptions& options, std::ostream& out, std::ostream& err);

/// Writes `<out>/correction.json`, `before.json`, `after.json`,
/// `optimization.json`, and the split parts when the input was split.
int cmd_optimize(const OptimizeOptions& options, std::ostream& out, std::ostream& err);

/// Writes `<out>/corrected_predictions.csv`, `original_metrics.json`, `metrics.json`.
int cmd_apply(const ApplyOptions& options, std::ostream& out, std::ostream& err);

/// Writes `<out>/synthetic.<csv|jsonl>` and `synthetic_metrics.json`.
int cmd_synth(const SynthOptions& options, std::ostream& out, std::ostream& err);

/// Renders before/after reports; writes `<out>/comparison.json` when asked.
int cmd_report(const ReportOptions& options, std::ostream& out, std::ostream& err);

}  // namespace ginidebias::cli
