#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <json.hpp>
#include <random>
#include <sstream>

#include "plse/cli.hpp"
#include "plse/ingest.hpp"
#include "test_support.hpp"

using namespace plse;
using plse::testing::corpus_path;
using plse::testing::read_corpus;
using plse::testing::read_text;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

struct TempDir {
    fs::path path;
    TempDir() {
        std::random_device rd;
        path = fs::temp_directory_path() / ("plse-cli-" + std::to_string(rd()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("derive and reduce reproduce the golden documents") {
    TempDir tmp;
    for (const std::string corpus : {"engine-flat", "engine-hierarchical"}) {
        CAPTURE(corpus);
        auto vm = tmp / (corpus + "-vm.json");
        auto reduced = tmp / (corpus + "-reduced.json");
        auto trace = tmp / (corpus + "-trace.json");
        REQUIRE(run_cli({"derive", "-i", corpus_path(corpus + "/layered.json"), "-o", vm}).code == cli::kExitOk);
        CHECK(read_text(vm) == read_corpus(corpus + "/expected/vm.json"));
        REQUIRE(run_cli({"reduce", "-i", vm, "-o", reduced, "--trace", trace}).code == cli::kExitOk);
        CHECK(read_text(reduced) == read_corpus(corpus + "/expected/reduced.json"));
        CHECK(read_text(trace) == read_corpus(corpus + "/expected/trace.json"));
    }
    auto reduced = run_cli({"reduce", "-i", corpus_path("logistics/vm.json")});
    CHECK(reduced.out == read_corpus("logistics/expected/reduced.json"));
}

TEST_CASE("outputs are byte-identical across runs") {
    auto a = run_cli({"derive", "-i", corpus_path("engine-hierarchical/layered.json")});
    auto b = run_cli({"derive", "-i", corpus_path("engine-hierarchical/layered.json")});
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
}

TEST_CASE("strict refinement flag does not change the flat engine output") {
    auto a = run_cli({"derive", "-i", corpus_path("engine-flat/layered.json")});
    auto b = run_cli({"derive", "-i", corpus_path("engine-flat/layered.json"), "--strict-alg1"});
    CHECK(a.out == b.out);
}

TEST_CASE("derive can keep the layered model") {
    auto r = run_cli({"derive", "-i", corpus_path("engine-flat/layered.json"), "--with-artifacts"});
    REQUIRE(r.code == 0);
    CHECK(peek_kind(r.out) == DocumentKind::ProductLineModel);
    auto plm = parse_variability_model(r.out);
    CHECK(plm.artifacts);
}

TEST_CASE("reducing a model without interactions leaves it byte-identical") {
    auto r = run_cli({"reduce", "-i", corpus_path("interaction-free/vm.json")});
    CHECK(r.code == 0);
    CHECK(r.out == read_corpus("interaction-free/vm.json"));
}

TEST_CASE("report with and without a trace") {
    auto before = corpus_path("engine-flat/expected/vm.json");
    auto after = corpus_path("engine-flat/expected/reduced.json");
    auto with_trace = run_cli({"report", before, after, "--trace", corpus_path("engine-flat/expected/trace.json")});
    REQUIRE(with_trace.code == 0);
    CHECK(with_trace.out == read_corpus("engine-flat/expected/report.json"));
    auto j = nlohmann::json::parse(with_trace.out);
    CHECK(j["initial_vp_count"] == 3);
    CHECK(j["final_vp_count"] == 1);
    CHECK(j["reduction_percentage"] == 67);
    CHECK(j["unconstrained_before"] == "12");
    CHECK(j["valid_before"] == "2");
    CHECK(j["merges"].size() == 2);

    // Without a trace the merges are recomputed.
    CHECK(run_cli({"report", before, after}).out == with_trace.out);

    auto table = run_cli({"report", corpus_path("logistics/vm.json"), corpus_path("logistics/expected/reduced.json"),
                          "--format", "table"});
    REQUIRE(table.code == 0);
    CHECK(table.out.find("20%") != std::string::npos);
    CHECK(table.out.find("5 -> 4") != std::string::npos);
}

TEST_CASE("report rejects a trace that does not fit the models") {
    auto r = run_cli({"report", corpus_path("logistics/vm.json"), corpus_path("logistics/expected/reduced.json"),
                      "--trace", corpus_path("engine-flat/expected/trace.json")});
    CHECK(r.code == cli::kExitModel);
}

TEST_CASE("reduction percentage rounds halves up") {
    CHECK(cli::reduction_percentage(3, 1) == 67);
    CHECK(cli::reduction_percentage(5, 4) == 20);
    CHECK(cli::reduction_percentage(8, 7) == 13);
    CHECK(cli::reduction_percentage(200, 199) == 1);
    CHECK(cli::reduction_percentage(0, 0) == 0);
    CHECK(cli::reduction_percentage(4, 4) == 0);
}

TEST_CASE("configs subcommand") {
    auto vm = corpus_path("engine-flat/expected/vm.json");
    auto count = run_cli({"configs", "-i", vm, "--count"});
    CHECK(count.code == 0);
    CHECK(count.out == "12 unconstrained, 2 valid\n");

    auto listed = run_cli({"configs", "-i", vm, "--enumerate"});
    CHECK(listed.out == "{P2, PF2, S2}\n{P3, PF3, S3}\n");

    auto ok = run_cli({"configs", "-i", vm, "--validate", corpus_path("engine-flat/config-valid.json")});
    CHECK(ok.code == 0);
    CHECK(ok.out == "valid\n");
    auto bad = run_cli({"configs", "-i", vm, "--validate", corpus_path("engine-flat/config-invalid.json")});
    CHECK(bad.code == cli::kExitModel);
    CHECK(bad.out.find("interaction-closure") != std::string::npos);

    auto over = run_cli({"configs", "-i", vm, "--count", "--budget", "5"});
    CHECK(over.code == cli::kExitBudget);
    CHECK(over.out == "12 unconstrained\n");
}

TEST_CASE("budget can come from the environment") {
    auto vm = corpus_path("engine-flat/expected/vm.json");
    ::setenv("PLSE_BUDGET", "4", 1);
    auto over = run_cli({"configs", "-i", vm, "--count"});
    auto explicit_budget = run_cli({"configs", "-i", vm, "--count", "--budget", "100"});
    ::setenv("PLSE_BUDGET", "lots", 1);
    auto malformed = run_cli({"configs", "-i", vm, "--count"});
    ::unsetenv("PLSE_BUDGET");
    CHECK(over.code == cli::kExitBudget);
    CHECK(explicit_budget.code == cli::kExitOk);
    CHECK(malformed.code == cli::kExitModel);
}

TEST_CASE("exit codes for usage and model errors") {
    CHECK(run_cli({}).code == cli::kExitUsage);
    CHECK(run_cli({"frobnicate"}).code == cli::kExitUsage);
    CHECK(run_cli({"derive"}).code == cli::kExitUsage);
    CHECK(run_cli({"derive", "-i", "/no/such/file.json"}).code == cli::kExitUsage);
    CHECK(run_cli({"configs", "-i", corpus_path("logistics/vm.json")}).code == cli::kExitUsage);
    CHECK(run_cli({"configs", "-i", corpus_path("logistics/vm.json"), "--count", "--enumerate"}).code ==
          cli::kExitUsage);
    CHECK(run_cli({"--help"}).code == cli::kExitOk);

    auto bad = run_cli({"reduce", "-i", corpus_path("negative/refinement-cycle.json")});
    CHECK(bad.code == cli::kExitModel);
    CHECK(bad.err.find("invalid-model") != std::string::npos);
    CHECK(run_cli({"derive", "-i", corpus_path("negative/layer-skip.json")}).code == cli::kExitModel);
    CHECK(run_cli({"reduce", "-i", corpus_path("negative/malformed.json")}).code == cli::kExitModel);
    // A layered document is not a variability model.
    CHECK(run_cli({"reduce", "-i", corpus_path("engine-flat/layered.json")}).code == cli::kExitModel);
}
