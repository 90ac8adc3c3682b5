#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "doctest.h"
#include "ginidebias/cli.hpp"
#include "ginidebias/correction.hpp"
#include "ginidebias/dataset.hpp"

using namespace ginidebias;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

class TempDir {
public:
    TempDir() {
        std::random_device rd;
        path_ = fs::temp_directory_path() / ("ginidebias-cli-" + std::to_string(rd()) + std::to_string(rd()));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    [[nodiscard]] const fs::path& path() const { return path_; }
    fs::path operator/(const std::string& name) const { return path_ / name; }

private:
    fs::path path_;
};

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json read_json(const fs::path& path) { return json::parse(read_file(path)); }

json strip_timestamps(json j) {
    if (j.is_object()) {
        j.erase("timestamps");
        for (auto& [key, value] : j.items()) value = strip_timestamps(value);
    }
    return j;
}

int run_cli(const std::string& args) {
    const std::string command = std::string(GINIDEBIAS_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(command.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

json report_json(double mean, double dominance, double cobias, double gini, std::vector<double> per_class) {
    const auto n = per_class.size();
    return {{"schema_version", 1},
            {"kind", "metrics_report"},
            {"n_classes", n},
            {"mean_accuracy", mean},
            {"gini", gini},
            {"cobias", cobias},
            {"top_class_dominance", dominance},
            {"max_gini_bound", (static_cast<double>(n) - 1.0) / static_cast<double>(n)},
            {"per_class", {{"accuracies", per_class}, {"supports", nullptr}, {"class_names", nullptr}}}};
}

// Head-biased synthetic predictions written via cmd_synth.
fs::path synth_file(const TempDir& dir, std::uint64_t seed) {
    cli::SynthOptions opts;
    opts.classes = 4;
    opts.counts = {80};
    opts.head_bias = 2.0;
    opts.head_classes = std::vector<std::size_t>{0};
    opts.noise = 1.0;
    opts.seed = seed;
    opts.out = dir.path();
    std::ostringstream out, err;
    REQUIRE(cli::cmd_synth(opts, out, err) == 0);
    return dir / "synthetic.csv";
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("value formatting and relative improvement") {
    CHECK(cli::format_value(0.7475) == "0.75");
    CHECK(cli::format_value(std::nullopt) == "n/a");
    CHECK(cli::relative_improvement(0.21, 0.03) == "↓ 86%");
    CHECK(cli::relative_improvement(0.42, 0.06) == "↓ 86%");
    CHECK(cli::relative_improvement(0.75, 0.88) == "↑ 17%");
    CHECK(cli::relative_improvement(1.31, 1.11) == "↓ 15%");
    CHECK(cli::relative_improvement(0.23, 0.37) == "↑ 61%");
    CHECK(cli::relative_improvement(0.5, 0.5) == "0%");
    CHECK(cli::relative_improvement(0.0, 0.5) == "n/a");
    CHECK(cli::relative_improvement(std::nullopt, 0.5) == "n/a");
}

TEST_CASE("report json round trip") {
    const metrics::ClassAccuracyVector acc({0.85, 0.98, 0.97, 0.19}, {100, 100, 100, 100});
    const auto report = metrics::metrics_report(acc);
    const auto j = cli::report_to_json(report);
    CHECK(j["kind"] == "metrics_report");
    CHECK(j["schema_version"] == cli::kSchemaVersion);
    const auto back = cli::report_from_json(j);
    CHECK(back.mean_accuracy == report.mean_accuracy);
    CHECK(back.gini == report.gini);
    CHECK(back.cobias == report.cobias);
    CHECK(back.top_class_dominance == report.top_class_dominance);
    CHECK(back.per_class == report.per_class);

    auto bad = j;
    bad["schema_version"] = 99;
    CHECK_THROWS_AS((void)cli::report_from_json(bad), DataError);
    bad = j;
    bad.erase("per_class");
    CHECK_THROWS_AS((void)cli::report_from_json(bad), DataError);
}

TEST_CASE("metrics on accuracy files") {
    TempDir dir;
    SUBCASE("agnews") {
        write_file(dir / "acc.json", R"({"accuracies": [0.85, 0.98, 0.97, 0.19],
                                          "class_names": ["World", "Sports", "Business", "Tech"]})");
        std::ostringstream out, err;
        CHECK(cli::cmd_metrics({dir / "acc.json", std::nullopt, dir.path(), false}, out, err) == 0);
        const auto text = out.str();
        CHECK(text.find("Tech") != std::string::npos);
        CHECK(text.find("Gini                        0.21") != std::string::npos);
        CHECK(text.find("COBias                      0.42") != std::string::npos);
        CHECK(text.find("Top-Class Dominance         1.31") != std::string::npos);
        CHECK(text.find("Mean Acc.                   0.75") != std::string::npos);
        const auto j = read_json(dir / "metrics.json");
        CHECK(j["gini"].get<double>() == doctest::Approx(0.208194).epsilon(1e-5));
        CHECK(j["per_class"]["class_names"][3] == "Tech");
    }
    SUBCASE("ddi") {
        write_file(dir / "acc.json", R"({"accuracies": [0, 0.87, 0.03, 0.04, 0.20]})");
        std::ostringstream out, err;
        CHECK(cli::cmd_metrics({dir / "acc.json", std::nullopt, dir.path(), false}, out, err) == 0);
        CHECK(out.str().find("Gini                        0.67") != std::string::npos);
        CHECK(out.str().find("COBias                      0.38") != std::string::npos);
        CHECK(out.str().find("Max Gini (N-1)/N            0.80") != std::string::npos);
    }
    SUBCASE("all zero accuracies leave gini undefined") {
        write_file(dir / "acc.json", R"({"accuracies": [0, 0, 0]})");
        std::ostringstream out, err;
        CHECK(cli::cmd_metrics({dir / "acc.json", std::nullopt, dir.path(), false}, out, err) == 0);
        CHECK(out.str().find("Gini                        n/a") != std::string::npos);
        CHECK(read_json(dir / "metrics.json")["gini"].is_null());
    }
    SUBCASE("single class") {
        write_file(dir / "acc.json", R"({"accuracies": [0.9]})");
        std::ostringstream out, err;
        CHECK(cli::cmd_metrics({dir / "acc.json", std::nullopt, dir.path(), false}, out, err) == 0);
        CHECK(out.str().find("COBias                      n/a") != std::string::npos);
        CHECK(err.str().find("warning") != std::string::npos);
        std::ostringstream out2, err2;
        CHECK(cli::cmd_metrics({dir / "acc.json", std::nullopt, dir.path(), true}, out2, err2) == cli::kExitData);
    }
}

TEST_CASE("metrics on predictions") {
    TempDir dir;
    write_file(dir / "p.csv", "prob_0,prob_1,label\n0.9,0.1,0\n0.6,0.4,1\n0.3,0.7,1\n");
    std::ostringstream out, err;
    CHECK(cli::cmd_metrics({dir / "p.csv", std::nullopt, dir.path(), false}, out, err) == 0);
    const auto j = read_json(dir / "metrics.json");
    CHECK(j["per_class"]["accuracies"] == json{1.0, 0.5});
    CHECK(j["per_class"]["supports"] == json{1, 2});

    write_file(dir / "missing.csv", "prob_0,prob_1,label\n0.9,0.1,0\n0.6,0.4,0\n");
    CHECK_THROWS_AS(cli::cmd_metrics({dir / "missing.csv", std::nullopt, dir.path(), false}, out, err), DataError);
    write_file(dir / "noext", "");
    CHECK_THROWS_AS(cli::cmd_metrics({dir / "noext", std::nullopt, dir.path(), false}, out, err), ConfigError);
}

TEST_CASE("report renders relative improvements") {
    TempDir dir;
    write_file(dir / "before.json", report_json(0.75, 1.31, 0.42, 0.21, {0.85, 0.98, 0.97, 0.19}).dump());
    write_file(dir / "after.json", report_json(0.88, 1.11, 0.06, 0.03, {0.85, 0.98, 0.85, 0.85}).dump());
    cli::ReportOptions opts{dir / "before.json", dir / "after.json", dir.path(), "Debiased (Opt. Metric: Gini)"};
    std::ostringstream out, err;
    REQUIRE(cli::cmd_report(opts, out, err) == 0);
    const auto text = out.str();
    CHECK(text.find("Debiased (Opt. Metric: Gini)") != std::string::npos);
    CHECK(text.find("[0.85, 0.98, 0.97, 0.19]") != std::string::npos);

    const auto rows = read_json(dir / "comparison.json")["rows"];
    REQUIRE(rows.size() == 4);
    CHECK(rows[0]["metric"] == "mean_accuracy");
    CHECK(rows[0]["rendered"] == "↑ 17%");
    CHECK(rows[1]["rendered"] == "↓ 15%");
    CHECK(rows[2]["rendered"] == "↓ 86%");
    CHECK(rows[3]["rendered"] == "↓ 86%");
    for (const auto& row : rows) CHECK(text.find(row["rendered"].get<std::string>()) != std::string::npos);

    std::ostringstream same;
    CHECK(cli::cmd_report({dir / "before.json", dir / "before.json", std::nullopt, "Debiased"}, same, err) == 0);
    CHECK(same.str().find("0%") != std::string::npos);
    CHECK(same.str().find("↓ ") == std::string::npos);
    CHECK(same.str().find("↑ ") == std::string::npos);

    write_file(dir / "five.json", report_json(0.23, 3.8, 0.38, 0.67, {0, 0.87, 0.03, 0.04, 0.2}).dump());
    CHECK_THROWS_AS(cli::cmd_report({dir / "before.json", dir / "five.json", std::nullopt, "x"}, out, err),
                    DataError);
}

TEST_CASE("apply with hand-built artifacts") {
    TempDir dir;
    write_file(dir / "p.csv", "prob_0,prob_1,label\n0.9,0.1,0\n0.6,0.4,1\n0.3,0.7,1\n");

    const correction::CorrectionMap map({correction::CorrectionFunction::identity(),
                                         correction::CorrectionFunction::scale(0.2)});
    write_file(dir / "scale.json", correction::artifact_to_json({map, correction::SelectionVector({2, 1}), {}}).dump());
    std::ostringstream out, err;
    REQUIRE(cli::cmd_apply({dir / "p.csv", dir / "scale.json", std::nullopt, dir / "scaled", false}, out, err) == 0);
    // 0.9*0.2 = 0.18 > 0.1 keeps row 0; 0.6*0.2 = 0.12 < 0.4 flips row 1.
    CHECK(read_file(dir / "scaled" / "corrected_predictions.csv") ==
          "id,label,original,corrected\n0,0,0,0\n1,1,0,1\n2,1,1,1\n");
    CHECK(read_json(dir / "scaled" / "metrics.json")["per_class"]["accuracies"] == json{1.0, 1.0});
    CHECK(read_json(dir / "scaled" / "original_metrics.json")["per_class"]["accuracies"] == json{1.0, 0.5});

    write_file(dir / "id.json",
               correction::artifact_to_json({correction::CorrectionMap::default_map(),
                                             correction::SelectionVector::all_identity(2), {}})
                   .dump());
    REQUIRE(cli::cmd_apply({dir / "p.csv", dir / "id.json", std::nullopt, dir / "id", false}, out, err) == 0);
    CHECK(read_file(dir / "id" / "metrics.json") == read_file(dir / "id" / "original_metrics.json"));

    write_file(dir / "three.json",
               correction::artifact_to_json({correction::CorrectionMap::default_map(),
                                             correction::SelectionVector::all_identity(3), {}})
                   .dump());
    CHECK_THROWS_AS(cli::cmd_apply({dir / "p.csv", dir / "three.json", std::nullopt, dir / "x", false}, out, err),
                    DataError);
    write_file(dir / "broken.json", "{\"functions\": [");
    CHECK_THROWS_AS(cli::cmd_apply({dir / "p.csv", dir / "broken.json", std::nullopt, dir / "x", false}, out, err),
                    ConfigError);
}

TEST_CASE("optimize, then apply the artifact to the held-out part") {
    TempDir dir;
    const auto input = synth_file(dir, 11);
    cli::OptimizeOptions opts;
    opts.input = input;
    opts.seed = 5;
    opts.out = dir / "run";
    std::ostringstream out, err;
    REQUIRE(cli::cmd_optimize(opts, out, err) == 0);
    CHECK(out.str().find("Debiased (Opt. Metric: Gini)") != std::string::npos);

    for (const char* name : {"correction.json", "before.json", "after.json", "optimization.json",
                             "optimization_set.csv", "test_set.csv"}) {
        CHECK(fs::exists(dir / "run" / name));
    }
    const auto before = read_json(dir / "run" / "before.json");
    const auto after = read_json(dir / "run" / "after.json");
    CHECK(after["gini"].get<double>() < before["gini"].get<double>());

    const auto result = read_json(dir / "run" / "optimization.json");
    CHECK(result["result"]["best_objective"].get<double>() <= result["result"]["initial_objective"].get<double>());
    const auto& manifest = result["manifest"];
    CHECK(manifest["seed"] == 5);
    CHECK(manifest["inputs"][0]["sha256"] == cli::file_sha256(input));
    CHECK(manifest["inputs"][0]["sha256"].get<std::string>().size() == 64);
    CHECK(manifest["config"]["split"]["stratified"] == true);

    std::ostringstream out2;
    REQUIRE(cli::cmd_apply({dir / "run" / "test_set.csv", dir / "run" / "correction.json", std::nullopt,
                            dir / "applied", false},
                           out2, err) == 0);
    CHECK(read_json(dir / "applied" / "metrics.json") == after);
    CHECK(read_json(dir / "applied" / "original_metrics.json") == before);
}

TEST_CASE("optimize variants") {
    TempDir dir;
    const auto input = synth_file(dir, 12);
    std::ostringstream out, err;

    SUBCASE("cobias objective from a config file") {
        write_file(dir / "cfg.json", R"({"objective": "cobias", "seed": 3, "correction_map": "weights_only",
                                          "anneal": {"restarts": 1}})");
        cli::OptimizeOptions opts;
        opts.input = input;
        opts.config = dir / "cfg.json";
        opts.out = dir / "run";
        REQUIRE(cli::cmd_optimize(opts, out, err) == 0);
        CHECK(out.str().find("Debiased (Opt. Metric: COBias)") != std::string::npos);
        const auto result = read_json(dir / "run" / "optimization.json");
        CHECK(result["objective"] == "cobias");
        CHECK(result["manifest"]["config"]["anneal"]["restarts"] == 1);
        CHECK(result["manifest"]["config"]["functions"].size() == 6);
        const auto& opt = result["optimization_set"];
        CHECK(opt["debiased"]["cobias"].get<double>() <= opt["original"]["cobias"].get<double>());
    }
    SUBCASE("identity map warns and changes nothing") {
        cli::OptimizeOptions opts;
        opts.input = input;
        opts.map = "identity";
        opts.out = dir / "run";
        REQUIRE(cli::cmd_optimize(opts, out, err) == 0);
        CHECK(err.str().find("warning") != std::string::npos);
        CHECK(read_json(dir / "run" / "before.json") == read_json(dir / "run" / "after.json"));
    }
    SUBCASE("explicit test file and exhaustive search") {
        const auto test = synth_file(dir, 13);
        cli::OptimizeOptions opts;
        opts.input = input;
        opts.test = test;
        opts.method = "exhaustive";
        opts.map = "weights_only";
        opts.out = dir / "run";
        REQUIRE(cli::cmd_optimize(opts, out, err) == 0);
        CHECK_FALSE(fs::exists(dir / "run" / "test_set.csv"));
        const auto result = read_json(dir / "run" / "optimization.json");
        CHECK(result["result"]["evaluations"] == 6 * 6 * 6 * 6);
        CHECK(result["manifest"]["inputs"].size() == 2);
    }
    SUBCASE("bad configuration") {
        cli::OptimizeOptions opts;
        opts.input = input;
        opts.out = dir / "run";
        opts.objective = "entropy";
        CHECK_THROWS_AS(cli::cmd_optimize(opts, out, err), ConfigError);
        opts.objective.reset();
        opts.split = 1.5;
        CHECK_THROWS_AS(cli::cmd_optimize(opts, out, err), ConfigError);
        opts.split.reset();
        write_file(dir / "cfg.json", R"({"anneal": {"cooling_rate": 1.5}})");
        opts.config = dir / "cfg.json";
        CHECK_THROWS_AS(cli::cmd_optimize(opts, out, err), ConfigError);
        write_file(dir / "cfg.json", R"({"correction_map": [{"kind": "scale", "weight": 0.5}]})");
        CHECK_THROWS_AS(cli::cmd_optimize(opts, out, err), ConfigError);
    }
}

TEST_CASE("synth is deterministic") {
    TempDir a, b;
    synth_file(a, 99);
    synth_file(b, 99);
    CHECK(read_file(a / "synthetic.csv") == read_file(b / "synthetic.csv"));
    CHECK(read_file(a / "synthetic_metrics.json") == read_file(b / "synthetic_metrics.json"));
    const auto spec = read_json(a / "synthetic_metrics.json")["synth_spec"];
    CHECK(spec["instances_per_class"] == json{80, 80, 80, 80});
    CHECK(spec["head_classes"] == json{0});

    TempDir c;
    cli::SynthOptions opts;
    opts.classes = 3;
    opts.counts = {5, 6};
    opts.out = c.path();
    std::ostringstream out, err;
    CHECK_THROWS_AS(cli::cmd_synth(opts, out, err), ConfigError);
}

TEST_CASE("optimize reruns match apart from timestamps") {
    TempDir dir;
    const auto input = synth_file(dir, 21);
    for (const char* run : {"r1", "r2"}) {
        cli::OptimizeOptions opts;
        opts.input = input;
        opts.seed = 8;
        opts.out = dir / run;
        std::ostringstream out, err;
        REQUIRE(cli::cmd_optimize(opts, out, err) == 0);
    }
    for (const char* name : {"before.json", "after.json"}) {
        CHECK(read_file(dir / "r1" / name) == read_file(dir / "r2" / name));
    }
    for (const char* name : {"optimization_set.csv", "test_set.csv"}) {
        CHECK(read_file(dir / "r1" / name) == read_file(dir / "r2" / name));
    }
    for (const char* name : {"correction.json", "optimization.json"}) {
        CHECK(strip_timestamps(read_json(dir / "r1" / name)) == strip_timestamps(read_json(dir / "r2" / name)));
    }
}

TEST_CASE("executable exit codes") {
    TempDir dir;
    const std::string d = dir.path().string();
    write_file(dir / "acc.json", R"({"accuracies": [0.85, 0.98, 0.97, 0.19]})");
    CHECK(run_cli("metrics --input " + d + "/acc.json --out " + d) == cli::kExitOk);
    CHECK(run_cli("--version") == cli::kExitOk);
    CHECK(run_cli("") == cli::kExitUsage);
    CHECK(run_cli("metrics") == cli::kExitUsage);
    CHECK(run_cli("metrics --input " + d + "/nope.csv") == cli::kExitUsage);

    write_file(dir / "neg.csv", "prob_0,prob_1,label\n0.9,-0.1,0\n");
    CHECK(run_cli("metrics --input " + d + "/neg.csv --out " + d) == cli::kExitData);
    write_file(dir / "one.json", R"({"accuracies": [0.5]})");
    CHECK(run_cli("metrics --input " + d + "/one.json --out " + d) == cli::kExitOk);
    CHECK(run_cli("metrics --strict --input " + d + "/one.json --out " + d) == cli::kExitData);

    CHECK(run_cli("synth --classes 7 --counts 6 --seed 1 --out " + d) == cli::kExitOk);
    CHECK(run_cli("optimize --input " + d + "/synthetic.csv --split 1.5 --out " + d + "/o") == cli::kExitConfig);
    // 9^7 selection vectors exceed the default enumeration budget.
    CHECK(run_cli("optimize --input " + d + "/synthetic.csv --method exhaustive --out " + d + "/o") ==
          cli::kExitInfeasible);
    CHECK(run_cli("synth --classes 1 --out " + d) == cli::kExitConfig);
}

}  // TEST_SUITE
