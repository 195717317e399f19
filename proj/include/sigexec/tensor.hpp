#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sigexec {

class Word;

/// Dense truncated tensor series (a_0, a_1, ..., a_N) with a_k in (R^d)^{⊗k}.
///
/// Level k is stored row-major: the coordinate of e_{i1}⊗...⊗e_{ik} lives at
/// index sum_j (i_j - 1) d^{k-j}, so the first letter is the most significant
/// digit. All levels are packed contiguously in one buffer.
class DenseTensor {
public:
    /// Largest number of coefficients a single tensor may hold.
    static constexpr std::size_t kMaxCoefficients = 100'000'000;

    DenseTensor() = default;
    /// Zero tensor. Throws InputError when d < 1, N < 0 or d^N exceeds the budget.
    DenseTensor(int dimension, int level);

    int dimension() const noexcept { return dimension_; }
    int level() const noexcept { return level_; }
    std::size_t size() const noexcept { return coeffs_.size(); }

    std::size_t level_size(int k) const { return offsets_[k + 1] - offsets_[k]; }
    std::size_t level_offset(int k) const { return offsets_[k]; }

    std::span<double> level_data(int k) {
        return {coeffs_.data() + offsets_[k], level_size(k)};
    }
    std::span<const double> level_data(int k) const {
        return {coeffs_.data() + offsets_[k], level_size(k)};
    }

    std::span<double> data() noexcept { return coeffs_; }
    std::span<const double> data() const noexcept { return coeffs_; }

    /// Coordinate indexed by the letters of `w`; throws if |w| > level or a letter exceeds d.
    double at(const Word& w) const;
    double& at(const Word& w);

    /// Flat index of word `w` inside the packed buffer.
    std::size_t flat_index(const Word& w) const;

    bool same_shape(const DenseTensor& other) const noexcept {
        return dimension_ == other.dimension_ && level_ == other.level_;
    }

    friend bool operator==(const DenseTensor&, const DenseTensor&) = default;

private:
    int dimension_ = 0;
    int level_ = -1;
    std::vector<std::size_t> offsets_;
    std::vector<double> coeffs_;
};

/// Truncated tensor product (a ⊗ b)_k = sum_j a_j ⊗ b_{k-j}; operands must share shape.
DenseTensor tensor_multiply(const DenseTensor& a, const DenseTensor& b);

/// Truncated tensor exponential of `x`; requires x_0 = 0.
DenseTensor tensor_exp(const DenseTensor& x);

/// Number of coefficients d^0 + ... + d^N, or 0 if it overflows the budget.
std::size_t tensor_size(int dimension, int level);

}  // namespace sigexec
