#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sigexec/algebra.hpp"
#include "sigexec/signature.hpp"

namespace sigexec {

enum class ModelKind { bm, ou_signal, order_flow, fbm };

/// How the order-flow jump marks Exp(eta0 * kappa) are read.
enum class MarkConvention {
    rate,  ///< eta0*kappa is the rate, mean mark 1/(eta0*kappa)
    mean,  ///< eta0*kappa is the mean mark
};

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);
std::string to_string(MarkConvention c);
MarkConvention mark_convention_from_string(const std::string& name);

/// Parameters of the unaffected midprice simulators. X starts at 0 and the
/// emitted paths are (t, 1 + X_t).
struct ModelParams {
    ModelKind kind = ModelKind::bm;
    double sigma = 0.02;   ///< price volatility
    double horizon = 1.0;  ///< T
    int steps = 250;       ///< uniform grid intervals on [0, T]

    // ou_signal: X_t = ∫ I ds + sigma W, dI = -gamma I dt + sigma0 dB
    double signal_start = 0.0;  ///< I_0
    double signal_decay = 0.0;  ///< gamma
    double signal_vol = 0.0;    ///< sigma0
    double signal_corr = 1.0;   ///< correlation of B with W; 1 means the signal shares W

    // order_flow: X_t = k ∫ (mu+ - mu-) ds + sigma W, dmu = -kappa mu dt + eta dL
    double flow_impact = 0.0;     ///< k
    double flow_decay = 0.0;      ///< kappa
    double flow_intensity = 0.0;  ///< lambda0
    double flow_mark = 0.0;       ///< eta0
    MarkConvention marks = MarkConvention::rate;

    // fbm: X_t = sigma W^H_t
    double hurst = 0.5;

    /// Throws InputError naming the offending field.
    void validate() const;
    Json to_json() const;
};

/// Augmented sample paths with the seeds that produced them.
struct PathBatch {
    std::vector<SamplePath> paths;
    std::uint64_t master_seed = 0;
    std::vector<std::uint64_t> path_seeds;  ///< empty for loaded data
    double horizon = 0.0;

    std::size_t size() const noexcept { return paths.size(); }
    /// Common value of the price coordinate at t_0, if every path shares it.
    std::optional<double> start_value() const;
};

/// Per-path RNG seed derived from the master seed; independent of scheduling.
std::uint64_t path_seed(std::uint64_t master_seed, std::size_t index);

/// Latent driver for tests: I_t for ou_signal, mu+_t for order_flow, empty otherwise.
struct SimulatedPath {
    SamplePath path;
    std::vector<double> latent;
};

/// Simulator with the time grid and, for fbm, the covariance factor built once.
class PathSimulator {
public:
    explicit PathSimulator(const ModelParams& params);
    SimulatedPath generate(std::uint64_t seed) const;
    const ModelParams& params() const noexcept { return p_; }

private:
    ModelParams p_;
    std::vector<double> times_;
    Eigen::MatrixXd factor_;
};

/// One path from an explicit seed.
SimulatedPath simulate_path(const ModelParams& params, std::uint64_t seed);

/// n_paths independent paths; parallel over paths, bit-identical for any thread count.
PathBatch simulate(const ModelParams& params, std::size_t n_paths, std::uint64_t seed);
/// Serial reference for simulate.
PathBatch simulate_serial(const ModelParams& params, std::size_t n_paths, std::uint64_t seed);

/// Reads `window_id,t,price` rows. Each window becomes one path in file order.
///
/// Times must be strictly increasing inside a window and lie in
/// [0, window_length]; they are mapped to [0, horizon] by t * horizon / window_length
/// (horizon defaults to window_length). A window that starts after 0 or ends before
/// window_length is padded flat to the boundary. With `normalize` every price is
/// divided by the window's first price, so each path starts at 1.
PathBatch load_windows_csv(const std::filesystem::path& file, double window_length, bool normalize,
                           std::optional<double> horizon = std::nullopt);

/// Writes the price coordinate of a batch as `window_id,t,price` (t scaled by time_scale).
void write_windows_csv(const PathBatch& batch, const std::filesystem::path& file, double time_scale = 1.0);

}  // namespace sigexec
