#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sigexec/market.hpp"
#include "sigexec/problem.hpp"

namespace sigexec {

/// Speed θ, inventory Q, execution price P and wealth W on a path's grid.
/// Q and W follow left-point sums: Q_{k+1} = Q_k − θ_k h_k, W_{k+1} = W_k + P_k θ_k h_k.
struct ExecutionTrace {
    std::vector<double> times;
    std::vector<double> speed;
    std::vector<double> inventory;
    std::vector<double> price;
    std::vector<double> wealth;
    double inventory_penalty = 0.0;  ///< ∫ Q² dt
    double cost = 0.0;               ///< W_T − φ∫Q² + Q_T(P_T − αQ_T)
};

struct PathOutcome {
    double cost = 0.0;
    double terminal_wealth = 0.0;
    double terminal_inventory = 0.0;
    double terminal_price = 0.0;
    double inventory_penalty = 0.0;

    /// Wealth after selling the leftover inventory at the penalised terminal price.
    double liquidated_wealth(double alpha) const {
        return terminal_wealth + terminal_inventory * (terminal_price - alpha * terminal_inventory);
    }
};

struct SampleStats {
    std::size_t n = 0;
    double mean = 0.0;
    double std_dev = 0.0;
    double std_error = 0.0;
};

SampleStats sample_stats(std::span<const double> xs);

struct BacktestReport {
    std::string label;
    std::vector<PathOutcome> outcomes;    ///< one per path, batch order
    std::vector<ExecutionTrace> traces;   ///< the first `keep_traces` paths
    SampleStats cost;
    /// Mean θ and Q across paths on the shared grid; empty when grids differ.
    std::vector<double> grid;
    std::vector<double> mean_speed;
    std::vector<double> mean_inventory;

    std::vector<double> costs() const;
    Json to_json() const;
};

/// Deterministic speed t ↦ θ_t.
using SpeedSchedule = std::function<double(double)>;

/// Replays the signature speed θ_{t_k} = <ℓ, Ŝ_{0,t_k}> with impact <g^ℓ, Ŝ_{0,t_k}> from
/// streaming prefix signatures. Parallel over paths.
BacktestReport run_strategy(const Strategy& strategy, const PathBatch& batch, const ProblemSpec& spec,
                            std::size_t keep_traces = 0);
/// Serial reference for run_strategy.
BacktestReport run_strategy_serial(const Strategy& strategy, const PathBatch& batch, const ProblemSpec& spec,
                                   std::size_t keep_traces = 0);

/// Replays a deterministic schedule. Impact is computed from θ_{t_k} and the
/// traded quantity q0 − Q_{t_k} under the same impact model.
BacktestReport run_schedule(const SpeedSchedule& schedule, const std::string& label, const PathBatch& batch,
                            const ProblemSpec& spec, std::size_t keep_traces = 0);

/// Constant speed q0 / T.
SpeedSchedule twap_schedule(const ProblemSpec& spec);

/// Closed-form risk-penalised liquidation speed. Needs λ > 0 and α > ½k + √(λφ).
SpeedSchedule almgren_chriss_schedule(const ProblemSpec& spec);
double almgren_chriss_inventory(const ProblemSpec& spec, double t);

/// θ and Q of the closed-form benchmark on `grid`; price and wealth stay empty.
ExecutionTrace almgren_chriss_trace(const ProblemSpec& spec, std::span<const double> grid);

/// (w − w_ac) / w_ac × 10⁴.
double savings_per_share(double w, double w_ac);

/// Per-path savings of `candidate` over `benchmark` using liquidated wealth.
std::vector<double> savings_series(const BacktestReport& candidate, const BacktestReport& benchmark, double alpha);

/// Columns path_id,t,theta,Q,P,W for every stored trace.
void write_traces_csv(const BacktestReport& report, const std::filesystem::path& file);

}  // namespace sigexec
