#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sigexec/backtest.hpp"
#include "sigexec/expsig.hpp"
#include "sigexec/market.hpp"
#include "sigexec/optimize.hpp"
#include "sigexec/problem.hpp"

namespace sigexec {

/// Window CSV inputs replacing the simulator.
struct DataSource {
    std::filesystem::path train_csv;
    std::filesystem::path test_csv;
    double window_length = 0.0;
    bool normalize = true;
};

/// One JSON document driving expsig, solve, backtest and reproduce.
struct ExperimentConfig {
    std::string name = "custom";
    ModelParams model;
    ProblemSpec problem;
    std::optional<int> order;  ///< truncation order N; sets M = (N - 3) / 2
    std::size_t train_paths = 10000;
    std::size_t test_paths = 10000;
    std::uint64_t seed = 20240601;
    std::optional<DataSource> data;
    std::vector<std::string> benchmarks{"twap", "almgren_chriss"};
    std::size_t trace_paths = 100;
    std::vector<double> phi_sweep;
    SolveMethod method = SolveMethod::automatic;
    Json reference = Json::object();  ///< target values echoed next to ours
    std::vector<std::string> assumed;  ///< fields whose values are our choice

    /// Checks cross-field consistency; throws InputError naming the field.
    void validate() const;
    /// Fully resolved form, defaults included.
    Json to_json() const;
    static ExperimentConfig from_json(const Json& j);
    static ExperimentConfig from_file(const std::filesystem::path& file);
};

ModelParams model_params_from_json(const Json& j);

/// M for a truncation order N: the largest M with 2M + 3 <= N.
int speed_level_for_order(int order);

std::vector<std::string> preset_names();
/// Throws InputError for unknown names.
ExperimentConfig preset(const std::string& name);

struct Batches {
    PathBatch train;
    PathBatch test;
};

/// Simulated (train seed, derived test seed) or loaded from the configured CSVs.
PathBatch train_batch(const ExperimentConfig& cfg);
PathBatch test_batch(const ExperimentConfig& cfg);
std::uint64_t test_seed(std::uint64_t seed);

/// Training expected signature at level N. Simulated paths are streamed, never stored.
ExpectedSignature expected_signature_for(const ExperimentConfig& cfg);

struct PipelineResult {
    SolveResult solved;
    BacktestReport signature;
    std::vector<BacktestReport> benchmarks;
    std::vector<double> savings_bps;  ///< per test path against almgren_chriss, if configured
    double speed_variation = 0.0;     ///< stdev / |mean| of θ over stored traces
};

/// Solves with `es` and backtests on `test` against the configured benchmarks.
PipelineResult run_pipeline(const ExperimentConfig& cfg, const ExpectedSignature& es, const PathBatch& test);

/// stdev/|mean| of θ over every stored trace and every grid point before T.
double speed_variation(const BacktestReport& report);

// File-producing commands behind the CLI. Each output embeds cfg.to_json().
void write_json(const std::filesystem::path& file, const Json& j);
Json read_json(const std::filesystem::path& file);

void cmd_expsig(const ExperimentConfig& cfg, const std::filesystem::path& out);
void cmd_solve(const ExperimentConfig& cfg, const std::filesystem::path& out,
               const std::optional<std::filesystem::path>& expsig_file);
void cmd_backtest(const ExperimentConfig& cfg, const std::filesystem::path& out,
                  const std::filesystem::path& strategy_file);
/// Runs expsig, solve and backtest (for every φ in the sweep) and writes summary.json.
Json cmd_reproduce(const ExperimentConfig& cfg, const std::filesystem::path& out);

}  // namespace sigexec
