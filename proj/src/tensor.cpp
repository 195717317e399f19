#include "sigexec/tensor.hpp"

#include <string>

#include "sigexec/algebra.hpp"
#include "sigexec/error.hpp"

namespace sigexec {

std::size_t tensor_size(int dimension, int level) {
    if (dimension < 1 || level < 0) return 0;
    std::size_t total = 0;
    std::size_t power = 1;
    for (int k = 0; k <= level; ++k) {
        total += power;
        if (total > DenseTensor::kMaxCoefficients) return 0;
        power *= static_cast<std::size_t>(dimension);
    }
    return total;
}

DenseTensor::DenseTensor(int dimension, int level) : dimension_(dimension), level_(level) {
    if (dimension < 1) throw InputError("tensor dimension must be >= 1");
    if (level < 0) throw InputError("tensor level must be >= 0");
    if (tensor_size(dimension, level) == 0) {
        throw InputError("tensor of dimension " + std::to_string(dimension) + " and level " +
                         std::to_string(level) + " exceeds the coefficient budget");
    }
    offsets_.resize(static_cast<std::size_t>(level) + 2);
    std::size_t power = 1;
    offsets_[0] = 0;
    for (int k = 0; k <= level; ++k) {
        offsets_[k + 1] = offsets_[k] + power;
        power *= static_cast<std::size_t>(dimension);
    }
    coeffs_.assign(offsets_.back(), 0.0);
}

std::size_t DenseTensor::flat_index(const Word& w) const {
    if (static_cast<int>(w.size()) > level_) {
        throw InputError("word " + w.to_string() + " is longer than tensor level " +
                         std::to_string(level_));
    }
    std::size_t idx = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (w[i] > dimension_) {
            throw InputError("word " + w.to_string() + " has a letter outside {1.." +
                             std::to_string(dimension_) + "}");
        }
        idx = idx * static_cast<std::size_t>(dimension_) + static_cast<std::size_t>(w[i] - 1);
    }
    return offsets_[w.size()] + idx;
}

double DenseTensor::at(const Word& w) const { return coeffs_[flat_index(w)]; }
double& DenseTensor::at(const Word& w) { return coeffs_[flat_index(w)]; }

DenseTensor tensor_multiply(const DenseTensor& a, const DenseTensor& b) {
    if (!a.same_shape(b)) throw InputError("tensor_multiply: shape mismatch");
    DenseTensor out(a.dimension(), a.level());
    for (int k = 0; k <= a.level(); ++k) {
        auto dst = out.level_data(k);
        for (int j = 0; j <= k; ++j) {
            auto lhs = a.level_data(j);
            auto rhs = b.level_data(k - j);
            const std::size_t stride = rhs.size();
            for (std::size_t i = 0; i < lhs.size(); ++i) {
                const double x = lhs[i];
                if (x == 0.0) continue;
                double* row = dst.data() + i * stride;
                for (std::size_t r = 0; r < stride; ++r) row[r] += x * rhs[r];
            }
        }
    }
    return out;
}

DenseTensor tensor_exp(const DenseTensor& x) {
    if (x.level_data(0)[0] != 0.0) throw InputError("tensor_exp: level-0 term must vanish");
    // Horner: 1 + x(1 + x/2(1 + x/3(...)))
    DenseTensor one(x.dimension(), x.level());
    one.level_data(0)[0] = 1.0;
    DenseTensor acc = one;
    for (int n = x.level(); n >= 1; --n) {
        DenseTensor term = tensor_multiply(x, acc);
        for (double& v : term.data()) v /= n;
        term.level_data(0)[0] += 1.0;
        acc = std::move(term);
    }
    return acc;
}

}  // namespace sigexec
