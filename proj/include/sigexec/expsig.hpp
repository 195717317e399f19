#pragma once

#include <optional>
#include <span>
#include <vector>

#include "sigexec/algebra.hpp"
#include "sigexec/market.hpp"
#include "sigexec/signature.hpp"
#include "sigexec/tensor.hpp"

namespace sigexec {

/// Coefficient-wise sample mean of path signatures with its standard errors.
class ExpectedSignature {
public:
    ExpectedSignature(DenseTensor mean, DenseTensor std_error, std::size_t n_samples,
                      std::optional<double> start_value);

    int dimension() const noexcept { return mean_.dimension(); }
    int level() const noexcept { return mean_.level(); }
    std::size_t n_samples() const noexcept { return n_samples_; }

    const DenseTensor& mean() const noexcept { return mean_; }
    /// Coefficient-wise sample standard deviation / sqrt(n).
    const DenseTensor& std_error() const noexcept { return std_error_; }

    /// Euclidean norm of each level 0..N of the mean.
    const std::vector<double>& level_norms() const noexcept { return level_norms_; }
    /// Euclidean norm of each level of the standard-error tensor.
    const std::vector<double>& level_std_errors() const noexcept { return level_std_errors_; }

    /// Shared initial price coordinate of the sampled paths, when known.
    std::optional<double> start_value() const noexcept { return start_value_; }

private:
    DenseTensor mean_;
    DenseTensor std_error_;
    std::size_t n_samples_;
    std::optional<double> start_value_;
    std::vector<double> level_norms_;
    std::vector<double> level_std_errors_;
};

inline double pair(const TensorFunctional& f, const ExpectedSignature& es) { return pair(f, es.mean()); }

/// Paths per reduction block. Blocks are reduced sequentially inside and merged
/// pairwise in a fixed tree, so results do not depend on the thread count.
inline constexpr std::size_t kEstimateBlock = 64;

/// Monte Carlo / empirical expected signature; parallel over blocks of paths.
ExpectedSignature estimate(const PathBatch& batch, int level);
/// Serial reference for estimate (same reduction tree).
ExpectedSignature estimate_serial(const PathBatch& batch, int level);

/// Same estimate as estimate(simulate(params, n_paths, seed), level), but paths are
/// generated inside each block and never stored.
ExpectedSignature estimate_streaming(const ModelParams& params, std::size_t n_paths, std::uint64_t seed, int level);

/// Closed-form expected signature exp⊗(T e1 + ½σ²T e2⊗e2) of the Stratonovich lift of (t, σW_t).
ExpectedSignature fawcett_bm_oracle(double horizon, int level, double sigma = 1.0);

/// Euclidean norm of each level of a tensor.
std::vector<double> level_norms(const DenseTensor& t);
inline std::vector<double> level_norms(const ExpectedSignature& es) { return es.level_norms(); }

Json to_json(const ExpectedSignature& es);
ExpectedSignature expected_signature_from_json(const Json& j);

}  // namespace sigexec
