// ginidebias: class-accuracy inequality metrics and post-hoc debiasing.

#include <iostream>

#include "CLI11.hpp"
#include "ginidebias/cli.hpp"

namespace {

void add_format(CLI::App* cmd, std::optional<std::string>& format, bool with_accuracy = false) {
    auto* opt = cmd->add_option("--format", format, "Input format (default: from file extension)");
    if (with_accuracy) {
        opt->check(CLI::IsMember({"csv", "jsonl", "accuracy"}));
    } else {
        opt->check(CLI::IsMember({"csv", "jsonl"}));
    }
}

}  // namespace

int main(int argc, char** argv) {
    using namespace ginidebias::cli;

    CLI::App app{"Gini-index class-accuracy metrics and post-hoc debiasing"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolVersion));

    MetricsOptions metrics_opts;
    auto* metrics = app.add_subcommand("metrics", "Report Gini, COBias and related metrics");
    metrics->add_option("--input", metrics_opts.input, "Predictions (.csv/.jsonl) or accuracy file (.json)")
        ->required()
        ->check(CLI::ExistingFile);
    add_format(metrics, metrics_opts.format, true);
    metrics->add_option("--out", metrics_opts.out, "Output directory");
    metrics->add_flag("--strict", metrics_opts.strict, "Fail when a metric is undefined");

    OptimizeOptions optimize_opts;
    std::optional<bool> stratified_flag;
    auto* optimize = app.add_subcommand("optimize", "Learn per-class corrections by simulated annealing");
    optimize->add_option("--input", optimize_opts.input, "Optimization (or full) predictions file")
        ->required()
        ->check(CLI::ExistingFile);
    optimize->add_option("--test", optimize_opts.test, "Held-out predictions; otherwise --input is split")
        ->check(CLI::ExistingFile);
    add_format(optimize, optimize_opts.format);
    optimize->add_option("--config", optimize_opts.config, "Run configuration JSON")->check(CLI::ExistingFile);
    optimize->add_option("--seed", optimize_opts.seed, "Seed for splitting and annealing");
    optimize->add_option("--objective", optimize_opts.objective, "Metric to minimize")
        ->check(CLI::IsMember({"gini", "cobias"}));
    optimize->add_option("--split", optimize_opts.split, "Optimization fraction of the split");
    optimize->add_flag("--stratified,!--no-stratified", stratified_flag, "Stratify the split by class");
    optimize->add_option("--map", optimize_opts.map, "Correction map preset")
        ->check(CLI::IsMember({"default", "weights_only", "identity"}));
    optimize->add_option("--method", optimize_opts.method, "Search method")
        ->check(CLI::IsMember({"anneal", "exhaustive"}));
    optimize->add_option("--out", optimize_opts.out, "Output directory");
    optimize->add_flag("--strict", optimize_opts.strict, "Strict mode");

    ApplyOptions apply_opts;
    auto* apply = app.add_subcommand("apply", "Apply a learned correction artifact");
    apply->add_option("--input", apply_opts.input, "Predictions file")->required()->check(CLI::ExistingFile);
    apply->add_option("--artifact", apply_opts.artifact, "correction.json from optimize")
        ->required()
        ->check(CLI::ExistingFile);
    add_format(apply, apply_opts.format);
    apply->add_option("--out", apply_opts.out, "Output directory");
    apply->add_flag("--strict", apply_opts.strict, "Strict mode");

    SynthOptions synth_opts;
    std::vector<std::size_t> head_classes;
    auto* synth = app.add_subcommand("synth", "Generate an imbalanced synthetic prediction set");
    synth->add_option("--config", synth_opts.config, "Synthesis spec JSON")->check(CLI::ExistingFile);
    synth->add_option("--classes", synth_opts.classes, "Number of classes");
    synth->add_option("--counts", synth_opts.counts, "Instances per class (one value applies to all)");
    synth->add_option("--head-bias", synth_opts.head_bias, "Logit bonus of head classes");
    auto* head_opt = synth->add_option("--head", head_classes, "Head class indices");
    synth->add_option("--noise", synth_opts.noise, "Logit noise scale");
    synth->add_option("--seed", synth_opts.seed, "Generator seed");
    synth->add_option("--format", synth_opts.format, "Output format")->check(CLI::IsMember({"csv", "jsonl"}));
    synth->add_option("--out", synth_opts.out, "Output directory");

    ReportOptions report_opts;
    auto* report = app.add_subcommand("report", "Compare two metrics reports");
    report->add_option("--before", report_opts.before, "Original metrics JSON")->required()->check(CLI::ExistingFile);
    report->add_option("--after", report_opts.after, "Debiased metrics JSON")->required()->check(CLI::ExistingFile);
    report->add_option("--title", report_opts.title, "Heading of the debiased column");
    report->add_option("--out", report_opts.out, "Directory for comparison.json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    if (stratified_flag) optimize_opts.stratified = stratified_flag;
    if (head_opt->count() > 0) synth_opts.head_classes = head_classes;

    return run_guarded(
        [&]() -> int {
            if (*metrics) return cmd_metrics(metrics_opts, std::cout, std::cerr);
            if (*optimize) return cmd_optimize(optimize_opts, std::cout, std::cerr);
            if (*apply) return cmd_apply(apply_opts, std::cout, std::cerr);
            if (*synth) return cmd_synth(synth_opts, std::cout, std::cerr);
            return cmd_report(report_opts, std::cout, std::cerr);
        },
        std::cerr);
}
