#include "ginidebias/cli.hpp"

#include <openssl/evp.h>

#include <array>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <fmt/format.h>

#include "ginidebias/correction.hpp"
#include "ginidebias/dataset.hpp"

namespace ginidebias::cli {

namespace fs = std::filesystem;
using nlohmann::json;

int exit_code_for(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::data: return kExitData;
        case ErrorKind::config: return kExitConfig;
        case ErrorKind::infeasible: return kExitInfeasible;
    }
    return kExitUsage;
}

int run_guarded(const std::function<int()>& command, std::ostream& err) {
    try {
        return command();
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e.kind());
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    }
}

namespace {

json optional_number(std::optional<double> value) {
    return value ? json(*value) : json(nullptr);
}

std::optional<double> read_optional(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<double>();
}

[[noreturn]] void fail(ErrorKind kind, const std::string& message) {
    if (kind == ErrorKind::config) throw ConfigError(message);
    if (kind == ErrorKind::infeasible) throw InfeasibleError(message);
    throw DataError(message);
}

json read_json_file(const fs::path& path, ErrorKind kind) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(kind, fmt::format("cannot open '{}'", path.string()));
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        fail(kind, fmt::format("{}: {}", path.string(), e.what()));
    }
}

void write_text(const fs::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError(fmt::format("cannot write '{}'", path.string()));
    out << text;
}

void write_json(const fs::path& path, const json& doc) { write_text(path, doc.dump(2) + "\n"); }

json with_schema(std::string_view kind, json body) {
    json doc = {{"schema_version", kSchemaVersion}, {"kind", kind}};
    doc.update(body);
    return doc;
}

std::string utc_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::array<char, 32> buf{};
    std::strftime(buf.data(), buf.size(), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf.data();
}

// Display width: counts UTF-8 code points.
std::size_t display_width(std::string_view s) {
    std::size_t width = 0;
    for (const char ch : s) {
        if ((static_cast<unsigned char>(ch) & 0xC0) != 0x80) ++width;
    }
    return width;
}

std::string pad(std::string_view s, std::size_t width) {
    std::string padded(s);
    for (auto w = display_width(s); w < width; ++w) padded += ' ';
    return padded;
}

std::string class_label(const metrics::ClassAccuracyVector& acc, std::size_t i) {
    return acc.class_names().empty() ? fmt::format("class {}", i) : acc.class_names()[i];
}

std::string accuracy_list(const metrics::ClassAccuracyVector& acc) {
    std::string list = "[";
    for (std::size_t i = 0; i < acc.size(); ++i) {
        if (i > 0) list += ", ";
        list += format_value(acc[i]);
    }
    return list + "]";
}

dataset::PredictionFormat resolve_format(const std::optional<std::string>& flag, const fs::path& path) {
    if (flag) {
        if (const auto f = dataset::parse_format(*flag)) return *f;
        throw ConfigError(fmt::format("unknown format '{}' (expected csv or jsonl)", *flag));
    }
    if (const auto f = dataset::format_from_path(path)) return *f;
    throw ConfigError(fmt::format("cannot infer the format of '{}'; pass --format", path.string()));
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw DataError(fmt::format("cannot create '{}': {}", dir.string(), ec.message()));
}

metrics::ClassAccuracyVector original_accuracy(const dataset::LabeledPredictionSet& set) {
    return dataset::per_class_accuracy(set, dataset::predict(set), /*strict=*/true);
}

}  // namespace

json report_to_json(const metrics::MetricsReport& report) {
    const auto& acc = report.per_class;
    json per_class = {{"accuracies", std::vector<double>(acc.accuracies().begin(), acc.accuracies().end())}};
    per_class["supports"] = acc.has_supports()
                                ? json(std::vector<std::size_t>(acc.supports().begin(), acc.supports().end()))
                                : json(nullptr);
    per_class["class_names"] = acc.class_names().empty() ? json(nullptr) : json(acc.class_names());
    return with_schema("metrics_report", {{"n_classes", acc.size()},
                                          {"mean_accuracy", report.mean_accuracy},
                                          {"gini", optional_number(report.gini)},
                                          {"cobias", optional_number(report.cobias)},
                                          {"top_class_dominance", optional_number(report.top_class_dominance)},
                                          {"max_gini_bound", report.max_gini_bound},
                                          {"per_class", std::move(per_class)}});
}

metrics::MetricsReport report_from_json(const json& j) {
    try {
        if (!j.is_object() || !j.contains("schema_version")) {
            throw DataError("metrics report JSON lacks \"schema_version\"");
        }
        if (j.at("schema_version").get<int>() != kSchemaVersion) {
            throw DataError(fmt::format("unsupported schema_version {}", j.at("schema_version").dump()));
        }
        const auto& pc = j.at("per_class");
        auto accuracies = pc.at("accuracies").get<std::vector<double>>();
        std::optional<metrics::ClassAccuracyVector> acc;
        if (pc.contains("supports") && !pc.at("supports").is_null()) {
            acc.emplace(std::move(accuracies), pc.at("supports").get<std::vector<std::size_t>>());
        } else {
            acc.emplace(std::move(accuracies));
        }
        if (pc.contains("class_names") && !pc.at("class_names").is_null()) {
            acc->set_class_names(pc.at("class_names").get<std::vector<std::string>>());
        }
        metrics::MetricsReport report;
        report.mean_accuracy = j.at("mean_accuracy").get<double>();
        report.gini = read_optional(j, "gini");
        report.cobias = read_optional(j, "cobias");
        report.top_class_dominance = read_optional(j, "top_class_dominance");
        report.max_gini_bound = j.contains("max_gini_bound") ? j.at("max_gini_bound").get<double>()
                                                             : metrics::max_gini_bound(acc->size());
        report.per_class = *std::move(acc);
        return report;
    } catch (const json::exception& e) {
        throw DataError(fmt::format("malformed metrics report: {}", e.what()));
    }
}

std::string format_value(std::optional<double> value) {
    if (!value) return "n/a";
    return fmt::format("{:.2f}", *value);
}

std::string relative_improvement(std::optional<double> before, std::optional<double> after) {
    if (!before || !after || *before == 0.0) return "n/a";
    const double change = (*after - *before) / *before;
    const long percent = std::lround(std::abs(change) * 100.0);
    if (percent == 0) return "0%";
    return fmt::format("{} {}%", change > 0 ? "↑" : "↓", percent);
}

std::string render_report(const metrics::MetricsReport& report) {
    const auto& acc = report.per_class;
    std::ostringstream os;
    os << fmt::format("Class accuracies ({} classes): {}\n", acc.size(), accuracy_list(acc));
    for (std::size_t i = 0; i < acc.size(); ++i) {
        os << "  " << pad(class_label(acc, i), 20) << format_value(acc[i]);
        if (acc.has_supports()) os << fmt::format("  (n={})", acc.supports()[i]);
        os << '\n';
    }
    constexpr std::size_t w = 28;
    os << pad("Mean Acc.", w) << format_value(report.mean_accuracy) << '\n';
    os << pad("Top-Class Dominance", w) << format_value(report.top_class_dominance) << '\n';
    os << pad("COBias", w) << format_value(report.cobias) << '\n';
    os << pad("Gini", w) << format_value(report.gini) << '\n';
    os << pad("Max Gini (N-1)/N", w) << format_value(report.max_gini_bound) << '\n';
    return os.str();
}

std::string render_comparison(const metrics::MetricsReport& before, const metrics::MetricsReport& after,
                              std::string_view after_title) {
    if (before.per_class.size() != after.per_class.size()) {
        throw DataError(fmt::format("reports cover {} and {} classes", before.per_class.size(),
                                    after.per_class.size()));
    }
    const std::string before_list = accuracy_list(before.per_class);
    const std::string after_list = accuracy_list(after.per_class);
    const std::size_t w0 = 26;
    const std::size_t w1 = std::max<std::size_t>(10, display_width(before_list) + 2);
    const std::size_t w2 = std::max(display_width(after_title), display_width(after_list)) + 2;

    std::ostringstream os;
    auto line = [&](std::string_view metric, const std::string& b, const std::string& a, const std::string& r) {
        os << pad(metric, w0) << pad(b, w1) << pad(a, w2) << r << '\n';
    };
    line("Evaluation Metric", "Original", std::string(after_title), "Relative Improvement");
    line("Class Acc.", before_list, after_list, "-");
    line("Mean Acc. (↑)", format_value(before.mean_accuracy), format_value(after.mean_accuracy),
         relative_improvement(before.mean_accuracy, after.mean_accuracy));
    line("Top-Class Dominance (↓)", format_value(before.top_class_dominance),
         format_value(after.top_class_dominance),
         relative_improvement(before.top_class_dominance, after.top_class_dominance));
    line("COBias (↓)", format_value(before.cobias), format_value(after.cobias),
         relative_improvement(before.cobias, after.cobias));
    line("Gini (↓)", format_value(before.gini), format_value(after.gini),
         relative_improvement(before.gini, after.gini));
    return os.str();
}

std::string file_sha256(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError(fmt::format("cannot open '{}'", path.string()));
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
    std::array<char, 1 << 16> buffer{};
    while (in) {
        in.read(buffer.data(), buffer.size());
        EVP_DigestUpdate(ctx.get(), buffer.data(), static_cast<std::size_t>(in.gcount()));
    }
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int length = 0;
    EVP_DigestFinal_ex(ctx.get(), digest.data(), &length);
    std::string hex;
    for (unsigned int i = 0; i < length; ++i) hex += fmt::format("{:02x}", digest[i]);
    return hex;
}

json manifest_to_json(const RunManifest& manifest) {
    json inputs = json::array();
    for (const auto& path : manifest.inputs) {
        inputs.push_back({{"path", path.string()}, {"sha256", file_sha256(path)}});
    }
    return {{"command", manifest.command},
            {"tool_version", kToolVersion},
            {"config", manifest.config},
            {"inputs", std::move(inputs)},
            {"seed", manifest.seed},
            {"timestamps", {{"started", manifest.started}, {"finished", utc_now()}}}};
}

// ---- metrics -------------------------------------------------------------------

int cmd_metrics(const MetricsOptions& options, std::ostream& out, std::ostream& err) {
    const auto ext = options.input.extension().string();
    const bool accuracy_input = options.format ? *options.format == "accuracy" : ext == ".json";

    std::optional<metrics::ClassAccuracyVector> acc;
    if (accuracy_input) {
        acc.emplace(dataset::read_accuracy_file(options.input));
    } else {
        const auto set = dataset::load_predictions(options.input, resolve_format(options.format, options.input));
        acc.emplace(dataset::per_class_accuracy(set, dataset::predict(set), /*strict=*/true));
    }

    const auto report = metrics::partial_metrics_report(*acc);
    out << render_report(report);
    ensure_dir(options.out);
    write_json(options.out / "metrics.json", report_to_json(report));

    if (acc->size() < 2) {
        err << "warning: COBias is undefined for a single class\n";
        if (options.strict) return kExitData;
    }
    return kExitOk;
}

// ---- optimize ------------------------------------------------------------------

namespace {

struct ResolvedOptimizeConfig {
    optimizer::Objective objective = optimizer::Objective::gini;
    std::uint64_t seed = 0;
    dataset::SplitSpec split;
    correction::CorrectionMap map = correction::CorrectionMap::default_map();
    json map_spec = "default";
    optimizer::AnnealConfig anneal;
    std::string method = "anneal";
    std::uint64_t exhaustive_budget = optimizer::kDefaultExhaustiveBudget;

    [[nodiscard]] json snapshot() const {
        json a = anneal;
        return {{"objective", optimizer::to_string(objective)},
                {"method", method},
                {"exhaustive_budget", exhaustive_budget},
                {"seed", seed},
                {"split", {{"fraction", split.optimization_fraction}, {"stratified", split.stratified}}},
                {"correction_map", map_spec},
                {"functions", map},
                {"anneal", std::move(a)}};
    }
};

correction::CorrectionMap map_from_spec(const json& spec) {
    if (spec.is_string()) {
        const auto name = spec.get<std::string>();
        if (name == "default") return correction::CorrectionMap::default_map();
        if (name == "weights_only") return correction::CorrectionMap::weights_only();
        if (name == "identity") return correction::CorrectionMap::identity_only();
        throw ConfigError(fmt::format("unknown correction map preset '{}'", name));
    }
    return correction::map_from_json(spec);
}

optimizer::Objective objective_from(const std::string& name) {
    if (const auto o = optimizer::parse_objective(name)) return *o;
    throw ConfigError(fmt::format("unknown objective '{}' (expected gini or cobias)", name));
}

ResolvedOptimizeConfig resolve(const OptimizeOptions& options) {
    ResolvedOptimizeConfig cfg;
    if (options.config) {
        const json doc = read_json_file(*options.config, ErrorKind::config);
        if (!doc.is_object()) throw ConfigError("run configuration must be a JSON object");
        try {
            if (doc.contains("objective")) cfg.objective = objective_from(doc.at("objective").get<std::string>());
            if (doc.contains("seed")) cfg.seed = doc.at("seed").get<std::uint64_t>();
            if (doc.contains("split")) {
                const auto& s = doc.at("split");
                if (s.contains("fraction")) cfg.split.optimization_fraction = s.at("fraction").get<double>();
                if (s.contains("stratified")) cfg.split.stratified = s.at("stratified").get<bool>();
            }
            if (doc.contains("correction_map")) cfg.map_spec = doc.at("correction_map");
            if (doc.contains("anneal")) cfg.anneal = optimizer::anneal_config_from_json(doc.at("anneal"));
            if (doc.contains("method")) cfg.method = doc.at("method").get<std::string>();
            if (doc.contains("exhaustive_budget")) cfg.exhaustive_budget = doc.at("exhaustive_budget").get<std::uint64_t>();
        } catch (const json::exception& e) {
            throw ConfigError(fmt::format("invalid run configuration: {}", e.what()));
        }
    }
    if (options.objective) cfg.objective = objective_from(*options.objective);
    if (options.seed) cfg.seed = *options.seed;
    if (options.split) cfg.split.optimization_fraction = *options.split;
    if (options.stratified) cfg.split.stratified = *options.stratified;
    if (options.map) cfg.map_spec = *options.map;
    if (options.method) cfg.method = *options.method;
    if (cfg.method != "anneal" && cfg.method != "exhaustive") {
        throw ConfigError(fmt::format("unknown method '{}' (expected anneal or exhaustive)", cfg.method));
    }

    cfg.map = map_from_spec(cfg.map_spec);
    cfg.split.seed = cfg.seed;
    cfg.anneal.seed = cfg.seed;
    cfg.anneal.validate();
    return cfg;
}

}  // namespace

int cmd_optimize(const OptimizeOptions& options, std::ostream& out, std::ostream& err) {
    const std::string started = utc_now();
    const auto cfg = resolve(options);
    const auto format = resolve_format(options.format, options.input);
    const auto data = dataset::load_predictions(options.input, format);

    ensure_dir(options.out);
    std::optional<dataset::LabeledPredictionSet> opt_set;
    std::optional<dataset::LabeledPredictionSet> test_set;
    if (options.test) {
        opt_set.emplace(data);
        test_set.emplace(dataset::load_predictions(*options.test, resolve_format(options.format, *options.test)));
        if (test_set->n_classes() != data.n_classes()) {
            throw DataError(fmt::format("test file has {} classes, optimization file {}", test_set->n_classes(),
                                        data.n_classes()));
        }
    } else {
        auto parts = dataset::split(data, cfg.split);
        dataset::save_predictions(options.out / fmt::format("optimization_set.{}", dataset::to_string(format)),
                                  parts.optimization, format);
        dataset::save_predictions(options.out / fmt::format("test_set.{}", dataset::to_string(format)), parts.test,
                                  format);
        opt_set.emplace(std::move(parts.optimization));
        test_set.emplace(std::move(parts.test));
    }

    if (cfg.map.size() == 1) {
        err << "warning: the correction map holds only the identity; results equal the original model\n";
    }

    const auto result = cfg.method == "exhaustive"
                            ? optimizer::exhaustive_search(*opt_set, cfg.map, cfg.objective, cfg.exhaustive_budget)
                            : optimizer::anneal(*opt_set, cfg.map, cfg.objective, cfg.anneal);

    const auto opt_before = metrics::metrics_report(original_accuracy(*opt_set));
    const auto opt_after = optimizer::evaluate_on_test(*opt_set, result.best_xi, cfg.map);
    const auto test_before = metrics::metrics_report(original_accuracy(*test_set));
    const auto test_after = optimizer::evaluate_on_test(*test_set, result.best_xi, cfg.map);

    RunManifest manifest{"optimize", cfg.snapshot(), {options.input}, cfg.seed, started};
    if (options.test) manifest.inputs.push_back(*options.test);
    const json manifest_json = manifest_to_json(manifest);

    json artifact = correction::artifact_to_json({cfg.map, result.best_xi, data.class_names()});
    artifact["manifest"] = manifest_json;
    write_json(options.out / "correction.json", with_schema("correction_artifact", std::move(artifact)));
    write_json(options.out / "before.json", report_to_json(test_before));
    write_json(options.out / "after.json", report_to_json(test_after));

    json result_json = result;
    write_json(options.out / "optimization.json",
               with_schema("optimization_result",
                           {{"objective", optimizer::to_string(cfg.objective)},
                            {"result", std::move(result_json)},
                            {"optimization_set", {{"original", report_to_json(opt_before)},
                                                  {"debiased", report_to_json(opt_after)}}},
                            {"test_set", {{"original", report_to_json(test_before)},
                                          {"debiased", report_to_json(test_after)}}},
                            {"manifest", manifest_json}}));

    const std::string title = cfg.objective == optimizer::Objective::gini ? "Debiased (Opt. Metric: Gini)"
                                                                          : "Debiased (Opt. Metric: COBias)";
    out << fmt::format("objective {}: optimization set {:.4f} -> {:.4f} ({} evaluations)\n",
                       optimizer::to_string(cfg.objective), result.initial_objective, result.best_objective,
                       result.evaluations);
    out << "selection xi: [";
    for (std::size_t i = 0; i < result.best_xi.size(); ++i) {
        out << (i ? ", " : "") << result.best_xi[i];
    }
    out << "]\n\nTest set:\n" << render_comparison(test_before, test_after, title);
    return kExitOk;
}

// ---- apply ---------------------------------------------------------------------

int cmd_apply(const ApplyOptions& options, std::ostream& out, std::ostream& err) {
    const auto set = dataset::load_predictions(options.input, resolve_format(options.format, options.input));
    const auto artifact = correction::artifact_from_json(read_json_file(options.artifact, ErrorKind::config));
    if (artifact.xi.size() != set.n_classes()) {
        throw DataError(fmt::format("artifact covers {} classes but '{}' has {}", artifact.xi.size(),
                                    options.input.string(), set.n_classes()));
    }
    const auto named = artifact.class_names.size() == set.n_classes() ? set.with_class_names(artifact.class_names)
                                                                       : set;
    if (!artifact.class_names.empty() && artifact.class_names.size() != set.n_classes()) {
        err << "warning: ignoring artifact class names of the wrong length\n";
    }

    const auto original = dataset::predict(named);
    const auto corrected = correction::corrected_predictions(named, artifact.xi, artifact.map);

    ensure_dir(options.out);
    std::ostringstream csv;
    csv << "id,label,original,corrected\n";
    for (std::size_t m = 0; m < named.size(); ++m) {
        const std::string id = named.ids().empty() ? std::to_string(m) : named.ids()[m];
        csv << id << ',' << named.label(m) << ',' << original[m] << ',' << corrected[m] << '\n';
    }
    write_text(options.out / "corrected_predictions.csv", csv.str());

    const auto before = metrics::metrics_report(dataset::per_class_accuracy(named, original, true));
    const auto after = metrics::metrics_report(dataset::per_class_accuracy(named, corrected, true));
    write_json(options.out / "original_metrics.json", report_to_json(before));
    write_json(options.out / "metrics.json", report_to_json(after));
    out << render_comparison(before, after, "Debiased");
    return kExitOk;
}

// ---- synth ---------------------------------------------------------------------

int cmd_synth(const SynthOptions& options, std::ostream& out, std::ostream& /*err*/) {
    dataset::SynthSpec spec;
    spec.instances_per_class.clear();
    std::vector<std::size_t> counts;
    std::string format_name = "csv";
    if (options.config) {
        const json doc = read_json_file(*options.config, ErrorKind::config);
        try {
            if (doc.contains("n_classes")) spec.n_classes = doc.at("n_classes").get<std::size_t>();
            if (doc.contains("instances_per_class")) {
                counts = doc.at("instances_per_class").get<std::vector<std::size_t>>();
            }
            if (doc.contains("head_bias")) spec.head_bias = doc.at("head_bias").get<double>();
            if (doc.contains("head_classes")) spec.head_classes = doc.at("head_classes").get<std::vector<std::size_t>>();
            if (doc.contains("noise_scale")) spec.noise_scale = doc.at("noise_scale").get<double>();
            if (doc.contains("seed")) spec.seed = doc.at("seed").get<std::uint64_t>();
            if (doc.contains("format")) format_name = doc.at("format").get<std::string>();
        } catch (const json::exception& e) {
            throw ConfigError(fmt::format("invalid synth configuration: {}", e.what()));
        }
    }
    if (options.classes) spec.n_classes = *options.classes;
    if (!options.counts.empty()) counts = options.counts;
    if (options.head_bias) spec.head_bias = *options.head_bias;
    if (options.head_classes) spec.head_classes = *options.head_classes;
    if (options.noise) spec.noise_scale = *options.noise;
    if (options.seed) spec.seed = *options.seed;
    if (options.format) format_name = *options.format;

    if (counts.empty()) counts = {100};
    spec.instances_per_class = counts.size() == 1 ? std::vector<std::size_t>(spec.n_classes, counts.front()) : counts;
    const auto format = dataset::parse_format(format_name);
    if (!format) throw ConfigError(fmt::format("unknown format '{}' (expected csv or jsonl)", format_name));

    const auto set = dataset::synthesize(spec);
    ensure_dir(options.out);
    const auto path = options.out / fmt::format("synthetic.{}", dataset::to_string(*format));
    dataset::save_predictions(path, set, *format);

    const auto report = metrics::metrics_report(original_accuracy(set));
    json spec_json = {{"n_classes", spec.n_classes},       {"instances_per_class", spec.instances_per_class},
                      {"head_bias", spec.head_bias},       {"head_classes", spec.head_classes},
                      {"noise_scale", spec.noise_scale},   {"seed", spec.seed},
                      {"format", dataset::to_string(*format)}};
    json doc = report_to_json(report);
    doc["synth_spec"] = std::move(spec_json);
    write_json(options.out / "synthetic_metrics.json", doc);

    out << fmt::format("wrote {} instances to {}\n", set.size(), path.string()) << render_report(report);
    return kExitOk;
}

// ---- report --------------------------------------------------------------------

int cmd_report(const ReportOptions& options, std::ostream& out, std::ostream& /*err*/) {
    const auto before = report_from_json(read_json_file(options.before, ErrorKind::data));
    const auto after = report_from_json(read_json_file(options.after, ErrorKind::data));
    out << render_comparison(before, after, options.title);

    if (options.out) {
        auto row = [](std::string_view metric, std::string_view better, std::optional<double> b,
                      std::optional<double> a) {
            json change = nullptr;
            if (b && a && *b != 0.0) change = (*a - *b) / *b;
            return json{{"metric", metric},
                        {"better", better},
                        {"original", optional_number(b)},
                        {"debiased", optional_number(a)},
                        {"relative_change", change},
                        {"rendered", relative_improvement(b, a)}};
        };
        json rows = json::array({row("mean_accuracy", "higher", before.mean_accuracy, after.mean_accuracy),
                                 row("top_class_dominance", "lower", before.top_class_dominance,
                                     after.top_class_dominance),
                                 row("cobias", "lower", before.cobias, after.cobias),
                                 row("gini", "lower", before.gini, after.gini)});
        ensure_dir(*options.out);
        write_json(*options.out / "comparison.json", with_schema("comparison", {{"rows", std::move(rows)}}));
    }
    return kExitOk;
}

}  // namespace ginidebias::cli
