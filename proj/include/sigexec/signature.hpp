#pragma once

#include <span>
#include <vector>

#include "sigexec/algebra.hpp"
#include "sigexec/tensor.hpp"

namespace sigexec {

/// Truncated signature of a path: a DenseTensor whose level-0 coefficient is 1.
class TruncatedSignature {
public:
    /// The unit signature (1, 0, ..., 0).
    TruncatedSignature(int dimension, int level);

    int dimension() const noexcept { return tensor_.dimension(); }
    int level() const noexcept { return tensor_.level(); }
    const DenseTensor& tensor() const noexcept { return tensor_; }
    std::span<const double> level_data(int k) const { return tensor_.level_data(k); }
    double at(const Word& w) const { return tensor_.at(w); }

    /// Right-multiplies in place by exp⊗(delta), i.e. appends one linear segment.
    void extend(std::span<const double> delta);

    friend bool operator==(const TruncatedSignature&, const TruncatedSignature&) = default;

private:
    friend TruncatedSignature chen_concat(const TruncatedSignature&, const TruncatedSignature&);
    friend TruncatedSignature segment_signature(std::span<const double>, int);
    explicit TruncatedSignature(DenseTensor t) : tensor_(std::move(t)) {}

    DenseTensor tensor_;
};

/// Samples of a piecewise-linear path: strictly increasing times and one point
/// in R^d per time. Values are stored row-major (point i at [i*d, (i+1)*d)).
class SamplePath {
public:
    SamplePath() = default;
    /// Throws InputError on fewer than two points, non-increasing times or
    /// a value buffer whose size is not times.size() * dimension.
    SamplePath(std::vector<double> times, std::vector<double> values, int dimension);

    /// Time-augmented path (t_i, x_i) from scalar samples.
    static SamplePath augmented(std::vector<double> times, std::span<const double> prices);

    int dimension() const noexcept { return dimension_; }
    std::size_t size() const noexcept { return times_.size(); }
    std::size_t segments() const noexcept { return times_.size() - 1; }
    double time(std::size_t i) const { return times_[i]; }
    std::span<const double> times() const noexcept { return times_; }
    std::span<const double> point(std::size_t i) const {
        return {values_.data() + i * static_cast<std::size_t>(dimension_), static_cast<std::size_t>(dimension_)};
    }
    double value(std::size_t i, int coord) const { return values_[i * dimension_ + coord]; }
    std::span<const double> values() const noexcept { return values_; }

    /// Increment of segment i (point i+1 minus point i) written into `out`.
    void increment(std::size_t i, std::span<double> out) const;

    friend bool operator==(const SamplePath&, const SamplePath&) = default;

private:
    std::vector<double> times_;
    std::vector<double> values_;
    int dimension_ = 0;
};

/// exp⊗(delta) truncated at `level`: level k equals delta^{⊗k} / k!.
TruncatedSignature segment_signature(std::span<const double> delta, int level);

/// Chen's identity: truncated tensor product of two signatures.
TruncatedSignature chen_concat(const TruncatedSignature& a, const TruncatedSignature& b);

/// Exact signature of the piecewise-linear interpolation of `path`.
TruncatedSignature path_signature(const SamplePath& path, int level);

/// Signatures over [t_0, t_k] for every grid index k; element 0 is the unit.
std::vector<TruncatedSignature> prefix_signatures(const SamplePath& path, int level);

/// Signatures of many paths. Parallel over paths when built with OpenMP.
std::vector<TruncatedSignature> batch_signatures(std::span<const SamplePath> paths, int level);
/// Serial reference for batch_signatures.
std::vector<TruncatedSignature> batch_signatures_serial(std::span<const SamplePath> paths, int level);

inline double pair(const TensorFunctional& f, const TruncatedSignature& s) { return pair(f, s.tensor()); }

}  // namespace sigexec
