#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const fs::path kRoot = fs::temp_directory_path() / "sigexec_test_cli";

int run(const std::string& args) {
    const std::string cmd = std::string(SIGEXEC_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path write_config(const std::string& name, const std::string& body) {
    fs::create_directories(kRoot);
    const fs::path p = kRoot / name;
    std::ofstream(p) << body;
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kConfig = R"({
  "model": {"type": "bm", "sigma": 0.02, "T": 1.0, "steps": 40},
  "problem": {"q0": 1.0, "alpha": 5.0, "phi": 0.001, "impact": {"type": "temporary_linear", "lambda": 0.001}},
  "order": 5, "train_paths": 1000, "test_paths": 100, "seed": 3, "trace_paths": 5
})";

}  // namespace

TEST_CASE("subcommands succeed and chain through files") {
    const auto cfg = write_config("ok.json", kConfig);
    const auto out = kRoot / "chain";
    fs::remove_all(out);
    const std::string common = "--config " + cfg.string() + " --out " + out.string();
    REQUIRE(run("expsig " + common) == 0);
    REQUIRE(fs::exists(out / "expsig.json"));
    REQUIRE(fs::exists(out / "level_norms.csv"));
    REQUIRE(run("solve " + common + " --expsig " + (out / "expsig.json").string()) == 0);
    REQUIRE(fs::exists(out / "strategy.json"));
    REQUIRE(run("backtest " + common + " --strategy " + (out / "strategy.json").string() + " --threads 1") == 0);
    const auto bt = nlohmann::json::parse(slurp(out / "backtest.json"));
    CHECK(bt.at("signature").at("n_paths") == 100);
    CHECK(bt.at("benchmarks").contains("almgren_chriss"));
    CHECK(bt.contains("savings_per_share_bps"));
}

TEST_CASE("runs are deterministic and the seed flag takes effect") {
    const auto cfg = write_config("ok.json", kConfig);
    const auto a = kRoot / "det_a", b = kRoot / "det_b", c = kRoot / "det_c";
    for (const auto& d : {a, b, c}) fs::remove_all(d);
    REQUIRE(run("reproduce --config " + cfg.string() + " --out " + a.string()) == 0);
    REQUIRE(run("reproduce --config " + cfg.string() + " --out " + b.string()) == 0);
    REQUIRE(run("reproduce --config " + cfg.string() + " --seed 99 --out " + c.string()) == 0);
    CHECK(slurp(a / "summary.json") == slurp(b / "summary.json"));
    CHECK(slurp(a / "backtest_traces.csv") == slurp(b / "backtest_traces.csv"));
    CHECK(slurp(a / "summary.json") != slurp(c / "summary.json"));
    const auto s = nlohmann::json::parse(slurp(c / "summary.json"));
    CHECK(s.at("config").at("seed") == 99);
}

TEST_CASE("input errors exit with 1") {
    CHECK(run("") == 1);
    CHECK(run("frobnicate") == 1);
    CHECK(run("expsig") == 1);
    CHECK(run("expsig --config /nonexistent/cfg.json") == 1);
    CHECK(run("reproduce") == 1);
    CHECK(run("reproduce no_such_preset --out " + (kRoot / "x").string()) == 1);
    const auto typo = write_config("typo.json", R"({"problem": {"alpah": 1, "impact": {"type": "temporary_linear", "lambda": 0.1}}})");
    CHECK(run("expsig --config " + typo.string() + " --out " + (kRoot / "typo").string()) == 1);
    const auto broken = write_config("broken.json", "{ not json");
    CHECK(run("expsig --config " + broken.string() + " --out " + (kRoot / "broken").string()) == 1);
    CHECK(run("solve --config " + write_config("ok.json", kConfig).string() + " --threads -2") == 1);
}

TEST_CASE("an ill-posed problem exits with 2") {
    const auto cfg = write_config("flat.json", R"({
      "model": {"type": "bm", "sigma": 0.02, "T": 1.0, "steps": 20},
      "problem": {"q0": 1.0, "alpha": 0.0, "phi": 0.0, "impact": {"type": "temporary_linear", "lambda": 0.0}},
      "order": 5, "train_paths": 200, "test_paths": 10, "seed": 1
    })");
    CHECK(run("solve --config " + cfg.string() + " --out " + (kRoot / "flat").string()) == 2);
}

TEST_CASE("help exits cleanly") {
    CHECK(run("--help") == 0);
    CHECK(run("reproduce --help") == 0);
}
